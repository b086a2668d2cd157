// Copyright 2026 The readout-sim Authors
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

// Command-line front end: parse configuration, dispatch presets or custom
// scenarios, write CSV.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "readout/config.hpp"
#include "readout/experiments.hpp"
#include "readout/spectral.hpp"

namespace {

using namespace readout;

struct CliOptions {
  std::string config_path;
  std::string output_dir = ".";
  std::vector<std::string> overrides;
  std::string threads = "auto";
  bool stamp = false;
};

unsigned resolve_thread_count(const std::string& flag) {
  std::string value = flag;
  if (value == "auto" || value.empty()) {
    if (const char* env = std::getenv("READOUT_SIM_THREADS")) value = env;
  }
  if (value == "auto" || value.empty()) return 0;
  const long n = std::strtol(value.c_str(), nullptr, 10);
  if (n <= 0) throw ConfigError("config: --threads expects a positive integer or 'auto'");
  return static_cast<unsigned>(n);
}

Scenario load_scenario(const CliOptions& opt) {
  Scenario sc = opt.config_path.empty()
                    ? parse_config_text("{}", opt.overrides)
                    : parse_config(opt.config_path, opt.overrides);
  sc.threads = resolve_thread_count(opt.threads);
  return sc;
}

std::vector<std::string> preset_comments(const Scenario& sc, const CliOptions& opt,
                                         const std::string& preset) {
  std::vector<std::string> c;
  c.push_back("readout-sim preset=" + preset);
  if (opt.stamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    c.push_back(std::string("generated=") + buf);
  }
  for (auto& line : describe_scenario(sc)) c.push_back(line);
  return c;
}

std::string out_path(const CliOptions& opt, const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.output_dir);
  return (fs::path(opt.output_dir) / name).string();
}

void write_pair_csv(const std::string& path, const std::vector<std::string>& comments,
                    const PairResult& pr, double eta) {
  std::vector<std::vector<double>> rows;
  rows.reserve(pr.curve.times.size());
  for (std::size_t i = 0; i < pr.curve.times.size(); ++i)
    rows.push_back({pr.curve.times[i], eta * pr.traj0.accumulated[i],
                    eta * pr.traj1.accumulated[i],
                    static_cast<double>(pr.curve.thresholds[i]), pr.curve.ps[i],
                    pr.traj0.flux[i], pr.traj1.flux[i], pr.traj0.kappa_n[i],
                    pr.traj1.kappa_n[i]});
  write_csv(path, comments,
            {"t_ns", "n0", "n1", "m", "ps", "flux0", "flux1", "kappa_n0",
             "kappa_n1"},
            rows);
}

void write_sweep_csv(const std::string& path, const std::vector<std::string>& comments,
                     const SweepResult& sr) {
  std::vector<std::vector<double>> rows;
  rows.reserve(sr.rows.size());
  for (const auto& r : sr.rows)
    rows.push_back({r.value, r.ps_opt, r.t_opt, static_cast<double>(r.m_opt),
                    r.n0_at_topt, r.n1_at_topt});
  write_csv(path, comments,
            {sr.parameter, "ps_opt", "t_opt_ns", "m_opt", "n0_at_topt",
             "n1_at_topt"},
            rows);
}

void report(const std::string& what, const SweepResult& sr,
            std::chrono::steady_clock::time_point start) {
  const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  std::cout << what << ": " << sr.rows.size() << " rows in " << dt.count()
            << " s\n";
}

int cmd_fig2(const CliOptions& opt) {
  Scenario sc = load_scenario(opt);
  sc.model = ModelKind::analytic;
  const auto rows = run_fig2(sc.c_values, sc.eta_T_nin_max, sc.analytic_points);
  std::vector<std::vector<double>> table;
  table.reserve(rows.size());
  for (const auto& r : rows)
    table.push_back({r.c, r.eta_T_nin, r.n0, r.n1, static_cast<double>(r.m), r.ps});
  write_csv(out_path(opt, "fig2_analytic.csv"), preset_comments(sc, opt, "fig2"),
            {"c", "eta_T_nin", "n0", "n1", "m", "ps"}, table);
  std::cout << "fig2: " << table.size() << " rows\n";
  return 0;
}

int cmd_fig3b(const CliOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(opt);
  const PairResult three = run_fig3b(ModelKind::three_level, sc);
  write_pair_csv(out_path(opt, "fig3b_three_level.csv"),
                 preset_comments(sc, opt, "fig3b three_level"), three, sc.params.eta);
  const PairResult four = run_fig3b(ModelKind::four_level, sc);
  write_pair_csv(out_path(opt, "fig3b_four_level.csv"),
                 preset_comments(sc, opt, "fig3b four_level"), four, sc.params.eta);
  const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  std::cout << "fig3b: three_level ps_opt=" << three.curve.ps_opt
            << " t_opt=" << three.curve.t_opt << " ns; four_level ps_opt="
            << four.curve.ps_opt << " t_opt=" << four.curve.t_opt << " ns ("
            << dt.count() << " s)\n";
  return 0;
}

int cmd_fig3c(const CliOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(opt);
  std::vector<double> dz = {0.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0};
  if (sc.sweep.has_value() && sc.sweep->name == "delta_z") dz = sc.sweep->values;
  double three_ref = 0.0;
  const SweepResult sr = run_fig3c(dz, sc, &three_ref);
  auto comments = preset_comments(sc, opt, "fig3c");
  comments.push_back("three_level_reference_ps_opt=" + std::to_string(three_ref));
  write_sweep_csv(out_path(opt, "fig3c_delta_z_sweep.csv"), comments, sr);
  report("fig3c", sr, t0);
  return 0;
}

int cmd_fig4(const CliOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(opt);
  std::vector<double> etas = {0.0,  0.0025, 0.005, 0.01, 0.015, 0.02,
                              0.025, 0.03,  0.04,  0.05, 0.075, 0.1};
  if (sc.sweep.has_value() && sc.sweep->name == "eta") etas = sc.sweep->values;
  const SweepResult sr = run_fig4(etas, sc);
  write_sweep_csv(out_path(opt, "fig4_eta_sweep.csv"),
                  preset_comments(sc, opt, "fig4"), sr);
  report("fig4", sr, t0);
  return 0;
}

int cmd_fig5_dephasing(const CliOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  // preset pins eta = 2.5%; an explicit --set params.eta=... still wins
  Scenario sc = [&] {
    std::vector<std::string> ov = opt.overrides;
    ov.insert(ov.begin(), "params.eta=0.025");
    Scenario base = opt.config_path.empty() ? parse_config_text("{}", ov)
                                            : parse_config(opt.config_path, ov);
    base.threads = resolve_thread_count(opt.threads);
    return base;
  }();
  std::vector<double> gd = {0.0, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 3.0};
  if (sc.sweep.has_value() && sc.sweep->name == "gamma_d") gd = sc.sweep->values;
  const SweepResult sr = run_fig5_dephasing(gd, sc);
  write_sweep_csv(out_path(opt, "fig5_dephasing_sweep.csv"),
                  preset_comments(sc, opt, "fig5-dephasing"), sr);
  report("fig5-dephasing", sr, t0);
  return 0;
}

int cmd_fig5_diffusion(const CliOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = [&] {
    std::vector<std::string> ov = opt.overrides;
    ov.insert(ov.begin(), "params.eta=0.025");
    Scenario base = opt.config_path.empty() ? parse_config_text("{}", ov)
                                            : parse_config(opt.config_path, ov);
    base.threads = resolve_thread_count(opt.threads);
    return base;
  }();
  std::vector<double> gi = {0.0, 0.5, 1.0, 2.0, 3.0};
  if (sc.sweep.has_value() && sc.sweep->name == "gamma_I") gi = sc.sweep->values;

  std::vector<DiffusionNodeRow> detail;
  std::vector<PairResult> node_curves;
  const SweepResult sr = run_fig5_diffusion(gi, sc, &detail, &node_curves);
  write_sweep_csv(out_path(opt, "fig5_diffusion_sweep.csv"),
                  preset_comments(sc, opt, "fig5-diffusion"), sr);

  // per-node curves so the averaged optimum can be recomputed offline
  std::vector<std::vector<double>> rows;
  for (std::size_t ni = 0; ni < detail.size(); ++ni) {
    const auto& pr = node_curves[ni];
    for (std::size_t t = 0; t < pr.curve.times.size(); ++t)
      rows.push_back({detail[ni].gamma_I, detail[ni].delta_omega,
                      detail[ni].weight, pr.curve.times[t],
                      sc.params.eta * pr.traj0.accumulated[t],
                      sc.params.eta * pr.traj1.accumulated[t], pr.curve.ps[t]});
  }
  write_csv(out_path(opt, "fig5_diffusion_nodes.csv"),
            preset_comments(sc, opt, "fig5-diffusion nodes"),
            {"gamma_I", "delta_omega_ghz", "weight", "t_ns", "n0", "n1", "ps"},
            rows);
  report("fig5-diffusion", sr, t0);
  return 0;
}

int cmd_run(const CliOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(opt);
  if (sc.sweep.has_value()) {
    const SweepResult sr = run_sweep(sc);
    write_sweep_csv(out_path(opt, "sweep_" + sr.parameter + ".csv"),
                    preset_comments(sc, opt, "sweep"), sr);
    report("sweep " + sr.parameter, sr, t0);
    return 0;
  }
  if (sc.model == ModelKind::analytic) {
    const auto rows = run_fig2(sc.c_values, sc.eta_T_nin_max, sc.analytic_points);
    std::vector<std::vector<double>> table;
    for (const auto& r : rows)
      table.push_back({r.c, r.eta_T_nin, r.n0, r.n1, static_cast<double>(r.m), r.ps});
    write_csv(out_path(opt, "run_analytic.csv"), preset_comments(sc, opt, "run"),
              {"c", "eta_T_nin", "n0", "n1", "m", "ps"}, table);
    std::cout << "run: analytic, " << table.size() << " rows\n";
    return 0;
  }
  const PairResult pr = run_model_pair(sc);
  write_pair_csv(out_path(opt, "run_curve.csv"), preset_comments(sc, opt, "run"),
                 pr, sc.params.eta);
  const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  std::cout << "run: ps_opt=" << pr.curve.ps_opt << " at t_opt=" << pr.curve.t_opt
            << " ns, m_opt=" << pr.curve.m_opt << " (" << dt.count() << " s)\n";
  return 0;
}

int cmd_sweep(const CliOptions& opt) {
  Scenario sc = load_scenario(opt);
  if (!sc.sweep.has_value())
    throw ConfigError("config: 'sweep' command requires a sweep block");
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult sr = run_sweep(sc);
  write_sweep_csv(out_path(opt, "sweep_" + sr.parameter + ".csv"),
                  preset_comments(sc, opt, "sweep"), sr);
  report("sweep " + sr.parameter, sr, t0);
  return 0;
}

int cmd_validate(const CliOptions& opt) {
  Scenario sc = load_scenario(opt);
  if (sc.model != ModelKind::analytic) {
    const LindbladSystem sys = build_system(sc);
    IntegratorConfig cfg;
    cfg.rel_tol = sc.integrator.rel_tol;
    cfg.abs_tol = sc.integrator.abs_tol;
    cfg.output_grid = {0.0, 1e-3};  // parse + build + one short step
    (void)evolve(sys, vacuum_state(sys.layout, kG0), cfg);
  } else {
    (void)run_fig2(sc.c_values, sc.eta_T_nin_max, 2);
  }
  std::cout << "OK\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-QED single-shot qubit readout simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON scenario file");
  app.add_option("--output-dir", opt.output_dir, "Directory for CSV output");
  app.add_option("--set", opt.overrides,
                 "Override a config key (dotted path, e.g. params.eta=0.025)");
  app.add_option("--threads", opt.threads,
                 "Worker threads (positive integer or 'auto'; env READOUT_SIM_THREADS)");
  app.add_flag("--stamp", opt.stamp, "Embed a timestamp comment in CSV output");

  int (*handler)(const CliOptions&) = nullptr;
  app.add_subcommand("run", "Run the configured scenario")->callback([&] { handler = cmd_run; });
  app.add_subcommand("sweep", "Run the configured parameter sweep")->callback([&] { handler = cmd_sweep; });
  app.add_subcommand("fig2", "Analytic readout curves for several cooperativities")->callback([&] { handler = cmd_fig2; });
  app.add_subcommand("fig3b", "Success probability vs probe duration, both models")->callback([&] { handler = cmd_fig3b; });
  app.add_subcommand("fig3c", "Optimal success probability vs Zeeman splitting")->callback([&] { handler = cmd_fig3c; });
  app.add_subcommand("fig4", "Optimal success probability vs collection efficiency")->callback([&] { handler = cmd_fig4; });
  app.add_subcommand("fig5-dephasing", "Optimal success probability vs dephasing rate")->callback([&] { handler = cmd_fig5_dephasing; });
  app.add_subcommand("fig5-diffusion", "Averaged success probability vs inhomogeneous linewidth")->callback([&] { handler = cmd_fig5_diffusion; });
  app.add_subcommand("validate", "Parse config, build the model, take one step")->callback([&] { handler = cmd_validate; });

  CLI11_PARSE(app, argc, argv);

  try {
    return handler(opt);
  } catch (const ConfigError& e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 1;
  } catch (const StiffnessError& e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 2;
  }
}
