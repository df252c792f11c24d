// Copyright 2026 The lfmf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfmf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lfmf {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError("unknown key " + join(path, item.key()));
  }
}

const json& expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path + ": expected an object");
  return v;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": not finite");
  return x;
}

long long get_integer(const json& v, const std::string& path, long long min) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  const long long x = v.get<long long>();
  if (x < min) {
    throw ConfigError(path + ": must be at least " + std::to_string(min));
  }
  return x;
}

Matrix get_matrix(const json& v, const std::string& path, int rows, int cols) {
  if (v.is_number()) {
    if (rows != 1 || cols != 1) {
      throw ConfigError(path + ": scalar given for a " + std::to_string(rows) +
                        "x" + std::to_string(cols) + " matrix");
    }
    return Matrix::Constant(1, 1, get_number(v, path));
  }
  if (!v.is_array()) throw ConfigError(path + ": expected a number or an array");
  if (static_cast<int>(v.size()) != rows) {
    throw ConfigError(path + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ConfigError(path + ": row " + std::to_string(r) + " needs " +
                        std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      m(r, c) = get_number(row[static_cast<std::size_t>(c)], path);
    }
  }
  return m;
}

Vector get_vector(const json& v, const std::string& path, int size) {
  if (v.is_number()) {
    if (size != 1) throw ConfigError(path + ": scalar given for a vector");
    return Vector::Constant(1, get_number(v, path));
  }
  if (!v.is_array()) throw ConfigError(path + ": expected a number or an array");
  if (static_cast<int>(v.size()) != size) {
    throw ConfigError(path + ": expected " + std::to_string(size) + " entries");
  }
  Vector out(size);
  for (int i = 0; i < size; ++i) out[i] = get_number(v[static_cast<std::size_t>(i)], path);
  return out;
}

ModelParams parse_model(const json& obj) {
  const std::string path = "model";
  expect_object(obj, path);
  reject_unknown(obj, path,
                 {"n", "m", "d", "A0", "B0", "C0", "D0", "A", "B", "C", "D", "F",
                  "Q0", "G0", "R0", "Theta0", "ThetaHat0", "eta0", "etaHat0", "Q",
                  "G", "R", "Theta", "Theta1", "ThetaHat", "ThetaHat1", "eta",
                  "etaHat", "alpha", "T", "xi0_mean", "xi0_std", "xi_mean",
                  "xi_std"});
  auto dim = [&](const char* key) {
    return obj.contains(key) ? static_cast<int>(get_integer(obj[key], join(path, key), 1))
                             : 1;
  };
  const int n = dim("n");
  const int m = dim("m");
  const int d = dim("d");
  ModelParams p = zero_params(n, m, d);
  p.xi0_std = Vector::Ones(n);
  p.xi_std = Vector::Ones(n);

  auto mat = [&](const char* key, Matrix& target, int rows, int cols) {
    if (obj.contains(key)) target = get_matrix(obj[key], join(path, key), rows, cols);
  };
  auto vec = [&](const char* key, Vector& target, int size) {
    if (obj.contains(key)) target = get_vector(obj[key], join(path, key), size);
  };
  mat("A0", p.a0, n, n);
  mat("B0", p.b0, n, m);
  mat("C0", p.c0, n, n);
  mat("D0", p.d0, n, d);
  mat("A", p.a, n, n);
  mat("B", p.b, n, m);
  mat("C", p.c, n, n);
  mat("D", p.d_noise, n, d);
  mat("F", p.f, n, n);
  mat("Q0", p.q0, n, n);
  mat("G0", p.g0, n, n);
  mat("R0", p.r0, m, m);
  mat("Theta0", p.theta0, n, n);
  mat("ThetaHat0", p.theta_hat0, n, n);
  vec("eta0", p.eta0, n);
  vec("etaHat0", p.eta_hat0, n);
  mat("Q", p.q, n, n);
  mat("G", p.g, n, n);
  mat("R", p.r, m, m);
  mat("Theta", p.theta, n, n);
  mat("Theta1", p.theta1, n, n);
  mat("ThetaHat", p.theta_hat, n, n);
  mat("ThetaHat1", p.theta_hat1, n, n);
  vec("eta", p.eta, n);
  vec("etaHat", p.eta_hat, n);
  if (obj.contains("alpha")) p.alpha = get_number(obj["alpha"], "model.alpha");
  if (obj.contains("T")) p.horizon = get_number(obj["T"], "model.T");
  vec("xi0_mean", p.xi0_mean, n);
  vec("xi0_std", p.xi0_std, n);
  vec("xi_mean", p.xi_mean, n);
  vec("xi_std", p.xi_std, n);
  try {
    return validate_params(p);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("model: ") + ex.what());
  }
}

std::string position_message(std::string_view text, std::size_t byte,
                             const std::string& what) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "syntax error at line " + std::to_string(line) + ", column " +
         std::to_string(col) + ": " + what;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ConfigError("model required");
  }
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& ex) {
    std::string what = ex.what();
    const auto cut = what.rfind(": ");
    if (cut != std::string::npos) what = what.substr(cut + 2);
    throw ConfigError(position_message(text, ex.byte, what));
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object");
  reject_unknown(doc, "",
                 {"model", "assembly", "grid", "simulate", "converge", "probe",
                  "output_dir"});
  if (!doc.contains("model")) throw ConfigError("model required");

  RunConfig cfg;
  cfg.model = parse_model(doc["model"]);

  if (doc.contains("assembly")) {
    const json& a = expect_object(doc["assembly"], "assembly");
    reject_unknown(a, "assembly", {"q_coupling"});
    if (a.contains("q_coupling")) {
      const json& v = a["q_coupling"];
      if (v == "sum") {
        cfg.assembly.q_coupling = QCoupling::kSum;
      } else if (v == "difference") {
        cfg.assembly.q_coupling = QCoupling::kDifference;
      } else {
        throw ConfigError("assembly.q_coupling: expected \"sum\" or \"difference\"");
      }
    }
  }
  if (doc.contains("grid")) {
    const json& g = expect_object(doc["grid"], "grid");
    reject_unknown(g, "grid", {"steps"});
    if (g.contains("steps")) cfg.steps = static_cast<int>(get_integer(g["steps"], "grid.steps", 2));
  }
  if (doc.contains("simulate")) {
    const json& s = expect_object(doc["simulate"], "simulate");
    reject_unknown(s, "simulate", {"N", "runs", "seed"});
    if (s.contains("N")) cfg.simulate.agents = static_cast<int>(get_integer(s["N"], "simulate.N", 1));
    if (s.contains("runs")) cfg.simulate.runs = static_cast<int>(get_integer(s["runs"], "simulate.runs", 1));
    if (s.contains("seed")) {
      cfg.simulate.seed = static_cast<std::uint64_t>(get_integer(s["seed"], "simulate.seed", 0));
    }
  }
  if (doc.contains("converge")) {
    const json& c = expect_object(doc["converge"], "converge");
    reject_unknown(c, "converge", {"N_values", "runs_per_N"});
    if (c.contains("N_values")) {
      const json& v = c["N_values"];
      if (!v.is_array() || v.empty()) {
        throw ConfigError("converge.N_values: expected a non-empty array");
      }
      cfg.converge.n_values.clear();
      for (const auto& x : v) {
        cfg.converge.n_values.push_back(
            static_cast<int>(get_integer(x, "converge.N_values", 1)));
      }
      for (std::size_t i = 1; i < cfg.converge.n_values.size(); ++i) {
        if (cfg.converge.n_values[i] <= cfg.converge.n_values[i - 1]) {
          throw ConfigError("converge.N_values: must be strictly increasing");
        }
      }
    }
    if (c.contains("runs_per_N")) {
      cfg.converge.runs_per_n = static_cast<int>(get_integer(c["runs_per_N"], "converge.runs_per_N", 1));
    }
  }
  if (doc.contains("probe")) {
    const json& pr = expect_object(doc["probe"], "probe");
    reject_unknown(pr, "probe", {"directions", "step", "runs", "pieces"});
    if (pr.contains("directions")) {
      cfg.probe.directions = static_cast<int>(get_integer(pr["directions"], "probe.directions", 1));
    }
    if (pr.contains("step")) {
      cfg.probe.step = get_number(pr["step"], "probe.step");
      if (cfg.probe.step < 0) throw ConfigError("probe.step: must be non-negative");
    }
    if (pr.contains("runs")) cfg.probe.runs = static_cast<int>(get_integer(pr["runs"], "probe.runs", 1));
    if (pr.contains("pieces")) {
      cfg.probe.pieces = static_cast<int>(get_integer(pr["pieces"], "probe.pieces", 1));
    }
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("output_dir: expected a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace lfmf
