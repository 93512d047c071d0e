#pragma once

// CSV and JSON serialization. Numbers go through std::to_chars, so output is
// locale-independent and uses the shortest round-trip representation.

#include <qpump/config.hpp>
#include <qpump/protocol.hpp>
#include <qpump/sweep.hpp>

#include <json.hpp>

#include <cmath>
#include <string>

namespace qpump {

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return detail::format_number(v);
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "cycle,step,t_us,fidelity,purity,pop_A,pop_B,pop_C,pop_rplus,pop_rminus,trace_err,min_eig\n";
  for (const Sample& s : traj.samples) {
    out += std::to_string(s.cycle) + ',' + std::to_string(s.step);
    for (double v : {s.time, s.fidelity, s.purity, s.pops.a, s.pops.b, s.pops.c, s.pops.r_plus, s.pops.r_minus,
                     s.trace_error, s.min_eigenvalue})
      out += ',' + csv_number(v);
    out += '\n';
  }
  return out;
}

/// Axis values are written back in plain config units.
inline std::string grid_csv(const SweepResult& result, SweepAxisName axis1, std::optional<SweepAxisName> axis2) {
  std::string out = "axis1,axis2,final_fidelity,final_purity\n";
  for (const SweepCell& c : result.cells) {
    out += csv_number(c.x1 / detail::axis_scale(axis1)) + ',';
    out += axis2 ? csv_number(c.x2 / detail::axis_scale(*axis2)) : std::string("nan");
    out += ',' + csv_number(c.final_fidelity) + ',' + csv_number(c.final_purity) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json sample_json(const Sample& s) {
  return {{"cycle", s.cycle},           {"step", s.step},           {"t_us", s.time},
          {"fidelity", s.fidelity},     {"purity", s.purity},       {"pop_A", s.pops.a},
          {"pop_B", s.pops.b},          {"pop_C", s.pops.c},        {"pop_rplus", s.pops.r_plus},
          {"pop_rminus", s.pops.r_minus}, {"trace_err", s.trace_error}, {"min_eig", s.min_eigenvalue}};
}

inline nlohmann::ordered_json parameters_json(const ResolvedConfig& cfg) {
  nlohmann::ordered_json plain(cfg.echo);
  const SystemParams& p = cfg.params;
  nlohmann::ordered_json internal = {
      {"omega1_rad_per_us", p.omega1}, {"omega2_rad_per_us", p.omega2}, {"delta_rad_per_us", p.delta},
      {"gamma1_rad_per_us", p.gamma1}, {"tau_us", p.tau},
      {"c6_rad_per_us_um6", p.c6},     {"c6_cross_rad_per_us_um6", p.c6_cross},
      {"r_pair_um", {p.r_pair.r12, p.r_pair.r13, p.r_pair.r23}},
      {"delta_r_um", cfg.errors.delta_r}, {"delta_t_rel", cfg.errors.delta_t_rel},
      {"doppler_rad_per_us", cfg.errors.doppler}};
  return {{"plain", plain}, {"internal", internal}};
}

}  // namespace qpump
