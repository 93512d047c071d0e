#pragma once

// qpump simulate | sweep | derive | validate
//
// Exit status: 0 success, 2 configuration error, 3 numerical-health failure,
// 4 sweep finished with failed cells, 5 invariant check failed, 1 anything else.

#include <qpump/config.hpp>
#include <qpump/report.hpp>
#include <qpump/validation.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifndef QPUMP_VERSION
#define QPUMP_VERSION "0.0.0"
#endif

namespace qpump::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalHealth = 3,
  kCellFailures = 4,
  kValidationFailed = 5,
};

struct CommonOptions {
  std::string config;
  std::string preset;
  std::vector<std::string> sets;
  std::optional<int> cycles;
  std::string model;
  std::optional<unsigned> workers;
  std::string out = ".";
};

inline ConfigFile load_config(const CommonOptions& opts) {
  ConfigFile cfg = opts.config.empty() ? ConfigFile::preset(opts.preset.empty() ? "fig3" : opts.preset)
                                       : ConfigFile::load(opts.config);
  if (!opts.config.empty() && !opts.preset.empty() && opts.preset != "fig3")
    throw Error(ErrorCode::Config, "unknown preset '" + opts.preset + "'");
  for (const auto& s : opts.sets) cfg.set(s);
  if (opts.cycles) cfg.set("cycles", std::to_string(*opts.cycles), "--cycles");
  if (!opts.model.empty()) cfg.set("model", opts.model, "--model");
  if (opts.workers) cfg.set("workers", std::to_string(*opts.workers), "--workers");
  return cfg;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Config, "cannot write '" + path.string() + "'");
  f << contents;
  if (!f) throw Error(ErrorCode::Config, "failed writing '" + path.string() + "'");
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Config, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NumericalHealth: return kNumericalHealth;
    case ErrorCode::NotHermitian: return kNumericalHealth;
    default: return kConfigError;
  }
}

inline int cmd_simulate(const CommonOptions& opts, std::ostream& out) {
  const ResolvedConfig cfg = resolve(load_config(opts));
  const auto dir = prepare_out_dir(opts.out);
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = run_protocol(cfg.run, cfg.params, cfg.errors);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const Sample& last = traj.final_sample();
  const double total_us = total_runtime(cfg.run, cfg.params, cfg.errors);
  nlohmann::ordered_json summary = {
      {"command", "simulate"},
      {"version", QPUMP_VERSION},
      {"model", to_string(cfg.run.model)},
      {"n_cycles", cfg.run.n_cycles},
      {"final_fidelity", last.fidelity},
      {"final_purity", last.purity},
      {"final_sample", sample_json(last)},
      {"min_fidelity", std::min_element(traj.samples.begin(), traj.samples.end(),
                                        [](const Sample& a, const Sample& b) { return a.fidelity < b.fidelity; })
                           ->fidelity},
      {"samples", traj.samples.size()},
      {"total_time_us", total_us},
      {"total_time_ms", total_us * 1e-3},
      {"wall_time_s", wall},
      {"parameters", parameters_json(cfg)},
  };
  write_file(dir / "trajectory.csv", trajectory_csv(traj));
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  out << "final fidelity " << csv_number(last.fidelity) << ", purity " << csv_number(last.purity) << " after "
      << cfg.run.n_cycles << " cycles (" << csv_number(total_us * 1e-3) << " ms)\n";
  return kOk;
}

inline int cmd_sweep(const CommonOptions& opts, const std::vector<std::string>& axes, std::ostream& out,
                     std::ostream& err) {
  ConfigFile file = load_config(opts);
  if (axes.size() > 2) throw Error(ErrorCode::Config, "at most two --axis options");
  for (std::size_t i = 0; i < axes.size(); ++i) file.set(i == 0 ? "sweep_axis1" : "sweep_axis2", axes[i], "--axis");
  if (axes.size() == 1) file.set("sweep_axis2", "none", "--axis");
  const ResolvedConfig cfg = resolve(file);
  if (!cfg.axis1) throw Error(ErrorCode::Config, "no sweep axis given (use --axis or sweep_axis1)");

  auto injects = [](const std::optional<SweepAxis>& a) {
    if (!a || (a->name != SweepAxisName::delta_r && a->name != SweepAxisName::doppler)) return false;
    return std::any_of(a->values.begin(), a->values.end(), [](double v) { return v != 0.0; });
  };
  if (cfg.run.model == Model::effective && (injects(cfg.axis1) || injects(cfg.axis2) || cfg.errors.injects_model_errors()))
    throw Error(ErrorCode::Config, "distance and Doppler sweeps need --model full");

  const auto dir = prepare_out_dir(opts.out);
  SweepGrid grid{*cfg.axis1, cfg.axis2, {cfg.run, cfg.params, cfg.errors}};
  const SweepResult result = run_sweep(grid, cfg.workers);

  auto axis_json = [](const SweepAxis& a) {
    std::vector<double> plain;
    for (double v : a.values) plain.push_back(v / detail::axis_scale(a.name));
    return nlohmann::ordered_json{{"name", to_string(a.name)}, {"values", plain}};
  };
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.cells.size(); ++i)
    if (result.cells[i].error) failures.push_back({{"cell", i}, {"error", *result.cells[i].error}});
  nlohmann::ordered_json meta = {
      {"command", "sweep"},
      {"version", QPUMP_VERSION},
      {"model", to_string(cfg.run.model)},
      {"axis1", axis_json(*cfg.axis1)},
      {"axis2", cfg.axis2 ? axis_json(*cfg.axis2) : nlohmann::ordered_json(nullptr)},
      {"rows", result.rows},
      {"cols", result.cols},
      {"workers", cfg.workers},
      {"failed_cells", result.failed_cells()},
      {"failures", failures},
      {"wall_time_s", result.wall_time_s},
      {"parameters", parameters_json(cfg)},
  };
  write_file(dir / "grid.csv",
             grid_csv(result, cfg.axis1->name, cfg.axis2 ? std::optional(cfg.axis2->name) : std::nullopt));
  write_file(dir / "metadata.json", meta.dump(2) + "\n");
  out << result.cells.size() << " cells, " << result.failed_cells() << " failed, " << csv_number(result.wall_time_s)
      << " s\n";
  if (result.failed_cells() > 0) {
    err << "sweep: " << result.failed_cells() << " cell(s) failed, see metadata.json\n";
    return kCellFailures;
  }
  return kOk;
}

inline int cmd_derive(const CommonOptions& opts, std::ostream& out) {
  const ResolvedConfig cfg = resolve(load_config(opts));
  const SystemParams& p = cfg.params;
  ThermalParams resonant = cfg.thermal;
  resonant.k_eff_per_m = cfg.k_eff_resonant_per_m;
  const double cycle = cycle_duration(p);

  nlohmann::ordered_json j;
  if (cfg.two_photon) {
    j["omega1_mhz"] = mhz_from_angular(effective_rabi_1(*cfg.two_photon));
    j["omega2_mhz"] = mhz_from_angular(effective_rabi_2(cfg.two_photon->omega_b, cfg.two_photon->delta1));
    j["rabi_source"] = "two_photon";
  } else {
    j["omega1_mhz"] = mhz_from_angular(p.omega1);
    j["omega2_mhz"] = mhz_from_angular(p.omega2);
    j["rabi_source"] = "config";
  }
  j["unconventional_pumping"] = p.unconventional_pumping();
  j["r0_um"] = matching_distance(p.c6_cross, p.delta);
  j["temperature_uk"] = cfg.thermal.temperature_uk;
  j["sigma_nm"] = thermal_sigma_nm(cfg.thermal);
  j["doppler_offresonant_khz"] = mhz_from_angular(doppler_sigma(cfg.thermal)) * 1e3;
  j["doppler_resonant_khz"] = mhz_from_angular(doppler_sigma(resonant)) * 1e3;
  j["cycle_us"] = cycle;
  j["n_cycles"] = cfg.run.n_cycles;
  j["total_us"] = cycle * cfg.run.n_cycles;
  j["total_ms"] = cycle * cfg.run.n_cycles * 1e-3;
  out << j.dump(2) << "\n";
  return kOk;
}

inline int cmd_validate(const CommonOptions& opts, std::ostream& out) {
  const ResolvedConfig cfg = resolve(load_config(opts), /*strict_distances=*/false);
  const auto checks = run_invariant_suite(cfg.params);
  bool all = true;
  for (const CheckResult& c : checks) {
    all = all && c.pass;
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << csv_number(c.value)
        << "  bound=" << csv_number(c.bound);
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  out << (all ? "all invariants hold\n" : "invariant check failed\n");
  return all ? kOk : kValidationFailed;
}

inline void add_common(CLI::App* cmd, CommonOptions& opts, bool with_out, bool with_workers) {
  cmd->add_option("--config", opts.config, "key = value configuration file");
  cmd->add_option("--preset", opts.preset, "named base configuration (fig3)");
  cmd->add_option("--set", opts.sets, "override key=value (repeatable)");
  cmd->add_option("--cycles", opts.cycles, "number of cycles");
  cmd->add_option("--model", opts.model, "full | effective")->check(CLI::IsMember({"full", "effective"}));
  if (with_workers) cmd->add_option("--workers", opts.workers, "sweep worker threads");
  if (with_out) cmd->add_option("--out", opts.out, "output directory");
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Dissipative GHZ(3,3) preparation on a three-atom Rydberg register"};
  app.require_subcommand(1);
  CommonOptions opts;
  std::vector<std::string> axes;

  auto* simulate = app.add_subcommand("simulate", "run the pump/dissipate protocol and write trajectory.csv");
  add_common(simulate, opts, true, false);
  auto* sweep = app.add_subcommand("sweep", "grid of protocol runs, writes grid.csv");
  add_common(sweep, opts, true, true);
  sweep->add_option("--axis", axes, "name=v1,v2,... or name=start:stop:count (up to two)");
  auto* derive = app.add_subcommand("derive", "print derived physical quantities as JSON");
  add_common(derive, opts, false, false);
  auto* validate = app.add_subcommand("validate", "run the model invariant suite");
  add_common(validate, opts, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(opts, out);
    if (*sweep) return cmd_sweep(opts, axes, out, err);
    if (*derive) return cmd_derive(opts, out);
    if (*validate) return cmd_validate(opts, out);
  } catch (const Error& e) {
    err << "qpump: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "qpump: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"qpump"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qpump::cli
