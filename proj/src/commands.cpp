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

#include "lfmf/commands.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "lfmf/analysis.hpp"
#include "lfmf/csv.hpp"
#include "lfmf/errors.hpp"
#include "lfmf/kernels.hpp"

namespace lfmf {

namespace {

namespace fs = std::filesystem;

using Outputs = std::vector<std::pair<std::string, CsvTable>>;

std::vector<std::string> matrix_header(const std::string& name, Eigen::Index rows,
                                       Eigen::Index cols) {
  std::vector<std::string> h{"t"};
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      h.push_back(name + "_" + std::to_string(r) + "_" + std::to_string(c));
    }
  }
  return h;
}

CsvTable matrix_series_table(const std::string& name, const MatrixSeries& s) {
  const Matrix& first = s[0];
  CsvTable t(matrix_header(name, first.rows(), first.cols()));
  for (int k = 0; k < s.size(); ++k) {
    t.row().add(s.grid().time(k));
    for (Eigen::Index r = 0; r < first.rows(); ++r) {
      for (Eigen::Index c = 0; c < first.cols(); ++c) t.add(s[k](r, c));
    }
  }
  return t;
}

CsvTable vector_series_table(const std::string& name, const VectorSeries& s) {
  std::vector<std::string> h{"t"};
  for (Eigen::Index i = 0; i < s[0].size(); ++i) h.push_back(name + "_" + std::to_string(i));
  CsvTable t(h);
  for (int k = 0; k < s.size(); ++k) {
    t.row().add(s.grid().time(k));
    for (Eigen::Index i = 0; i < s[k].size(); ++i) t.add(s[k][i]);
  }
  return t;
}

TimeGrid grid_of(const RunConfig& cfg) {
  return TimeGrid(cfg.model.horizon, cfg.steps);
}

void print_header(std::ostream& out, const std::string& command, const RunConfig& cfg) {
  out << "lfmf " << command << ": n=" << cfg.model.n << " m=" << cfg.model.m
      << " d=" << cfg.model.d << " T=" << cfg.model.horizon << " steps=" << cfg.steps
      << " kernels=" << kernels::isa_name(kernels::active().isa) << "\n";
}

Outputs cmd_check(const RunConfig& cfg, std::ostream& out, int& status) {
  const ModelParams p = validate_params(cfg.model);
  const BlockSystem system = assemble_blocks(p, compute_xi_terms(p), cfg.assembly);
  const TimeGrid grid = grid_of(cfg);
  const SolvabilityReport scan = solvability_scan(system, grid);
  CsvTable t({"t", "det"});
  for (int k = 0; k < grid.nodes(); ++k) t.row().add(grid.time(k)).add(scan.det_values[static_cast<std::size_t>(k)]);
  const double mid = 0.5 * p.horizon;
  out << "min_det " << format_number(scan.min_det) << "\n"
      << "det(" << format_number(mid) << ") "
      << format_number(coupling_determinant(system.coupled_drift, mid)) << "\n"
      << "solvable " << (scan.passed ? "yes" : "no") << "\n";
  status = scan.passed ? kExitOk : kExitSolvability;
  if (!scan.passed) out << "system not solvable on [0,T]\n";
  return {{"solvability.csv", std::move(t)}};
}

Outputs cmd_solve(const RunConfig& cfg, std::ostream& out, int& status) {
  const SolvedSystem s = solve_system(cfg.model, grid_of(cfg), cfg.assembly);
  const MatrixSeries k_ode = solve_K_ode(s.system.blocks, s.grid);
  double diff = 0.0;
  for (int k = 0; k < s.grid.nodes(); ++k) {
    diff = std::max(diff, (s.coupling.K[k] - k_ode[k]).cwiseAbs().maxCoeff());
  }
  const double residual = riccati_residual(s.system.blocks, s.coupling.K);
  const int last = s.grid.steps();
  const bool terminal_ok = s.coupling.K[last].isZero(0.0) &&
                           s.coupling.kappa[last] == s.system.terminal_offset &&
                           s.follower.pbar[last] == s.params.g;
  out << "min_det " << format_number(s.solvability.min_det) << "\n"
      << "K representation vs ode max diff " << format_number(diff) << "\n"
      << "Riccati residual " << format_number(residual) << "\n"
      << "K asymmetry " << format_number(s.coupling.asymmetry) << "\n"
      << "Pbar(0) " << format_number(s.follower.pbar[0](0, 0)) << "\n";
  status = terminal_ok ? kExitOk : kExitNumerical;
  if (!terminal_ok) out << "terminal conditions violated\n";
  return {{"K.csv", matrix_series_table("K", s.coupling.K)},
          {"kappa.csv", vector_series_table("kappa", s.coupling.kappa)},
          {"Pbar.csv", matrix_series_table("Pbar", s.follower.pbar)}};
}

Outputs cmd_simulate(const RunConfig& cfg, std::ostream& out, int& status) {
  const SolvedSystem s = solve_system(cfg.model, grid_of(cfg), cfg.assembly);
  const int agents = cfg.simulate.agents;
  const auto runs = static_cast<std::size_t>(cfg.simulate.runs);
  std::vector<ErrorSample> errors(runs);
  std::vector<CostReport> costs(runs);
  std::vector<PopulationRun> first(1);
  parallel_for(runs, 0, [&](std::size_t r) {
    const MeanFieldPath mf = sample_mean_field_path(s.system, s.coupling, s.params, s.grid,
                                                    cfg.simulate.seed,
                                                    static_cast<std::uint32_t>(r));
    SimulationOptions opt;
    opt.record_agents = r == 0;
    PopulationRun pop = simulate_population(mf, s.follower, s.coupling, s.params, agents, opt);
    errors[r] = compute_errors(pop, mf);
    costs[r] = pop.cost;
    if (r == 0) first[0] = std::move(pop);
  });

  const int n = s.params.n;
  std::vector<std::string> h{"t", "agent_id"};
  for (int i = 0; i < n; ++i) h.push_back("x_" + std::to_string(i));
  CsvTable traj(h);
  const PopulationRun& pop = first[0];
  for (int k = 0; k < s.grid.nodes(); ++k) {
    traj.row().add(s.grid.time(k)).add(0);
    for (int i = 0; i < n; ++i) traj.add(pop.x0_star(i, k));
    const AgentBlock& xs = pop.x_star[static_cast<std::size_t>(k)];
    for (std::size_t a = 0; a < xs.agents(); ++a) {
      traj.row().add(s.grid.time(k)).add(static_cast<long long>(a + 1));
      for (int i = 0; i < n; ++i) traj.add(xs.at(i, a));
    }
  }
  CsvTable err({"N", "run", "eps1_sq", "eps2_sq", "eps3_sq"});
  CsvTable cost({"N", "J0", "Ji_sum", "J_soc", "per_agent"});
  for (std::size_t r = 0; r < runs; ++r) {
    err.row().add(agents).add(static_cast<long long>(r)).add(errors[r].eps1)
        .add(errors[r].eps2).add(errors[r].eps3);
    cost.row().add(agents).add(costs[r].j0).add(costs[r].ji_sum).add(costs[r].j_soc)
        .add(costs[r].per_agent);
  }
  const ErrorReport report = aggregate_errors(errors);
  double per_agent = 0.0;
  for (const auto& c : costs) per_agent += c.per_agent;
  per_agent /= static_cast<double>(runs);
  out << "N " << agents << ", runs " << runs << ", seed " << cfg.simulate.seed << "\n";
  const char* names[3] = {"eps1_sq", "eps2_sq", "eps3_sq"};
  for (std::size_t j = 0; j < 3; ++j) {
    out << names[j] << " mean " << format_number(report.mean[j]) << " se "
        << format_number(report.std_error[j]) << "\n";
  }
  out << "J_soc/N mean " << format_number(per_agent) << "\n";
  status = kExitOk;
  return {{"trajectories.csv", std::move(traj)},
          {"errors.csv", std::move(err)},
          {"costs.csv", std::move(cost)}};
}

Outputs cmd_converge(const RunConfig& cfg, std::ostream& out, int& status) {
  const SolvedSystem s = solve_system(cfg.model, grid_of(cfg), cfg.assembly);
  const ConvergenceReport rep = convergence_study(s, cfg.converge.n_values,
                                                  cfg.converge.runs_per_n,
                                                  cfg.simulate.seed);
  CsvTable conv({"N", "eps1_mean", "eps1_se", "eps2_mean", "eps2_se", "eps3_mean",
                 "eps3_se"});
  CsvTable samples({"N", "run", "eps1_sq", "eps2_sq", "eps3_sq"});
  CsvTable costs({"N", "J0", "Ji_sum", "J_soc", "per_agent", "per_agent_se"});
  for (std::size_t c = 0; c < rep.n_values.size(); ++c) {
    const ErrorReport& e = rep.errors[c];
    conv.row().add(rep.n_values[c]);
    for (std::size_t j = 0; j < 3; ++j) conv.add(e.mean[j]).add(e.std_error[j]);
    for (std::size_t r = 0; r < e.samples.size(); ++r) {
      samples.row().add(rep.n_values[c]).add(static_cast<long long>(r))
          .add(e.samples[r].eps1).add(e.samples[r].eps2).add(e.samples[r].eps3);
    }
    const CostReport& mc = rep.mean_costs[c];
    costs.row().add(rep.n_values[c]).add(mc.j0).add(mc.ji_sum).add(mc.j_soc)
        .add(mc.per_agent).add(rep.cost_std_error[c]);
  }
  CsvTable slopes({"quantity", "slope", "note"});
  const char* names[3] = {"eps1_sq", "eps2_sq", "eps3_sq"};
  out << "runs per N " << rep.runs_per_n << ", seed " << rep.master_seed << "\n";
  for (std::size_t j = 0; j < 3; ++j) {
    slopes.row().add(std::string(names[j]));
    if (rep.slopes[j]) {
      slopes.add(*rep.slopes[j]).add(std::string(""));
      out << names[j] << " slope " << format_number(*rep.slopes[j]) << "\n";
    } else {
      slopes.add(std::string("")).add(rep.slope_notes[j]);
      out << names[j] << " slope " << rep.slope_notes[j] << "\n";
    }
  }
  status = kExitOk;
  return {{"convergence.csv", std::move(conv)},
          {"convergence_samples.csv", std::move(samples)},
          {"convergence_costs.csv", std::move(costs)},
          {"slopes.csv", std::move(slopes)}};
}

Outputs cmd_probe(const RunConfig& cfg, std::ostream& out, int& status) {
  const SolvedSystem s = solve_system(cfg.model, grid_of(cfg), cfg.assembly);
  ProbeOptions opt;
  opt.agents = cfg.simulate.agents;
  opt.directions = cfg.probe.directions;
  opt.step = cfg.probe.step;
  opt.runs = cfg.probe.runs;
  opt.pieces = cfg.probe.pieces;
  opt.seed = cfg.simulate.seed;
  const OptimalityProbe probe = optimality_probe(s, opt);
  CsvTable t({"direction_id", "target", "delta", "delta_half", "first_order",
              "second_order", "delta_se"});
  for (const auto& e : probe.entries) {
    t.row().add(e.direction).add(e.target).add(e.delta).add(e.delta_half)
        .add(e.first_order).add(e.second_order).add(e.std_error);
  }
  const double allowance = probe.bound_estimate * probe.step;
  out << "N " << probe.agents << ", directions " << probe.directions << ", runs "
      << probe.runs << ", step " << format_number(probe.step) << "\n"
      << "J_soc/N base " << format_number(probe.base_per_agent) << "\n"
      << "bound_estimate " << format_number(probe.bound_estimate) << "\n"
      << "max_gain " << format_number(probe.max_gain) << " (allowance "
      << format_number(-allowance) << ")\n"
      << "first-order check only; the centralized infimum is not computed\n"
      << "improving direction beyond allowance: "
      << (probe.max_gain < -allowance ? "yes" : "no") << "\n";
  status = kExitOk;
  return {{"probe.csv", std::move(t)}};
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg,
                const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, Outputs (*)(const RunConfig&, std::ostream&, int&)>
      table{{"check", cmd_check},
            {"solve", cmd_solve},
            {"simulate", cmd_simulate},
            {"converge", cmd_converge},
            {"probe", cmd_probe}};
  const auto it = table.find(command);
  if (it == table.end()) {
    err << "unknown command " << command << "\n";
    return kExitUsage;
  }
  try {
    print_header(out, command, cfg);
    int status = kExitOk;
    const Outputs files = it->second(cfg, out, status);
    fs::create_directories(out_dir);
    for (const auto& [name, table_data] : files) table_data.write(out_dir / name);
    return status;
  } catch (const SolvabilityError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitSolvability;
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& ex) {
    err << "numerical error: " << ex.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace lfmf
