#pragma once

// Flat key = value configuration files.
//
//   # comment
//   omega2_mhz = 0.04
//   model = full
//
// Frequencies are plain nu in MHz (the 2 pi is applied on resolution), times
// in us, distances in um, dispersion coefficients C6/(2 pi) in GHz um^6.
// Unknown keys are rejected with the offending line.

#include <qpump/sweep.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace qpump {

struct ConfigKey {
  std::string_view name;
  std::string_view fig3_default;
  std::string_view help;
};

/// Every accepted key with its value in the fig3 preset.
inline constexpr std::array<ConfigKey, 34> kConfigKeys{{
    {"preset", "fig3", "named base configuration (fig3)"},
    {"omega1_mhz", "4", "Omega1/(2 pi), far-detuned coupling to |r->"},
    {"omega2_mhz", "0.04", "Omega2/(2 pi), resonant pump to |r+>"},
    {"delta_mhz", "200", "Delta/(2 pi), detuning of |r->"},
    {"gamma1_mhz", "0.23", "Gamma1/(2 pi), |r+> decay rate"},
    {"tau_us", "3.19", "dissipation time per step"},
    {"c6_ghz_um6", "-4160", "C6/(2 pi)"},
    {"c6_cross_ghz_um6", "-4213", "C6'/(2 pi)"},
    {"r12_um", "auto", "pair distance, auto = matching distance"},
    {"r13_um", "auto", "pair distance, auto = matching distance"},
    {"r23_um", "auto", "pair distance, auto = matching distance"},
    {"model", "effective", "full | effective"},
    {"cycles", "30", "number of pump/dissipate cycles"},
    {"initial_state", "mixed27", "mixed27 | ghz | basis(i,j,k)"},
    {"record", "per_step", "per_step | per_substep"},
    {"substeps", "8", "samples per coherent phase when record = per_substep"},
    {"delta_r_um", "0", "offset added to every pair distance"},
    {"delta_t_rel", "0", "relative error on every coherent duration"},
    {"doppler_mhz", "0", "constant |r+> detuning/(2 pi)"},
    {"drives", "true", "diagnostic: false zeroes every laser coupling"},
    {"stark_compensation", "false", "cancel the |r->-coupling light shift on |a>"},
    {"coherent_decay", "false", "|r+> decay during coherent phases (RK4, slow)"},
    {"temperature_uk", "10", "atom temperature"},
    {"trap_freq_mhz", "0.09", "trap frequency/(2 pi)"},
    {"atom_mass_u", "86.909", "atomic mass"},
    {"k_eff_per_m", "1.54e7", "effective wave vector, off-resonant pathway"},
    {"k_eff_resonant_per_m", "5.35e6", "effective wave vector, resonant pathway"},
    {"omega_a_mhz", "none", "two-photon Rabi frequency to |r->"},
    {"omega_b_mhz", "none", "two-photon Rabi frequency to |r+>"},
    {"delta1_mhz", "none", "intermediate detuning, |r+> pathway"},
    {"delta2_mhz", "none", "intermediate detuning, |r-> pathway"},
    {"sweep_axis1", "none", "name=v1,v2,... or name=start:stop:count"},
    {"sweep_axis2", "none", "optional second sweep axis"},
    {"workers", "1", "sweep worker threads"},
}};

inline bool is_known_key(std::string_view key) {
  for (const auto& k : kConfigKeys)
    if (k.name == key) return true;
  return false;
}

struct ConfigEntry {
  std::string value;
  std::string origin;  ///< "file.cfg:12", "--set", "preset fig3"
};

class ConfigFile {
 public:
  /// The fig3 preset: every key at its default.
  static ConfigFile preset(std::string_view name) {
    if (name != "fig3") throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "'");
    ConfigFile cfg;
    for (const auto& k : kConfigKeys) cfg.entries_[std::string(k.name)] = {std::string(k.fig3_default), "preset fig3"};
    return cfg;
  }

  /// Parses text layered over the fig3 preset. `source` labels diagnostics.
  static ConfigFile parse(std::string_view text, const std::string& source) {
    ConfigFile cfg = preset("fig3");
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      const std::string where = source + ":" + std::to_string(lineno);
      if (eq == std::string::npos) throw Error(ErrorCode::Config, where + ": expected 'key = value'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (!is_known_key(key)) throw Error(ErrorCode::Config, where + ": unknown key '" + key + "'");
      if (value.empty()) throw Error(ErrorCode::Config, where + ": empty value for '" + key + "'");
      if (key == "preset" && value != "fig3")
        throw Error(ErrorCode::Config, where + ": unknown preset '" + value + "'");
      cfg.entries_[key] = {value, where};
    }
    return cfg;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
  }

  /// Applies "key=value".
  void set(std::string_view assignment, const std::string& origin = "--set") {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::Config, origin + ": expected key=value, got '" + std::string(assignment) + "'");
    set(trim(std::string(assignment.substr(0, eq))), trim(std::string(assignment.substr(eq + 1))), origin);
  }

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    if (!is_known_key(key)) throw Error(ErrorCode::Config, origin + ": unknown key '" + key + "'");
    entries_[key] = {value, origin};
  }

  [[nodiscard]] const ConfigEntry& entry(const std::string& key) const { return entries_.at(key); }
  [[nodiscard]] const std::string& value(const std::string& key) const { return entries_.at(key).value; }
  [[nodiscard]] const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, ConfigEntry> entries_;
};

/// A configuration converted to internal units.
struct ResolvedConfig {
  SystemParams params;
  RunConfig run;
  ErrorModel errors;
  ThermalParams thermal;
  double k_eff_resonant_per_m = 0.0;
  std::optional<TwoPhotonParams> two_photon;
  std::optional<SweepAxis> axis1;
  std::optional<SweepAxis> axis2;
  unsigned workers = 1;
  /// Fully resolved plain-unit parameter set, "auto" replaced by numbers.
  std::map<std::string, std::string> echo;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline double axis_scale(SweepAxisName a) {
  return (a == SweepAxisName::doppler || a == SweepAxisName::omega2) ? kTwoPi : 1.0;
}

}  // namespace detail

/// "name=v1,v2,..." or "name=start:stop:count" with plain units (um, MHz).
inline SweepAxis parse_axis_spec(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) throw Error(ErrorCode::Config, "axis spec needs name=values: " + std::string(spec));
  const std::string_view name = spec.substr(0, eq);
  const auto axis = parse_axis_name(name);
  if (!axis)
    throw Error(ErrorCode::Config, "unknown sweep axis '" + std::string(name) +
                                       "' (expected delta_r, delta_t_rel, doppler, omega2, n_cycles)");
  std::string_view body = spec.substr(eq + 1);
  SweepAxis out{*axis, {}};
  const double scale = detail::axis_scale(*axis);
  auto number = [&](std::string_view tok) {
    const auto v = detail::parse_number(tok);
    if (!v) throw Error(ErrorCode::Config, "bad sweep value '" + std::string(tok) + "' in " + std::string(spec));
    return *v;
  };
  if (body.find(':') != std::string_view::npos) {
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw Error(ErrorCode::Config, "range needs start:stop:count");
    const double start = number(body.substr(0, c1));
    const double stop = number(body.substr(c1 + 1, c2 - c1 - 1));
    const double count = number(body.substr(c2 + 1));
    if (count < 1 || count != std::round(count)) throw Error(ErrorCode::Config, "range count must be a positive integer");
    const int n = static_cast<int>(count);
    for (int i = 0; i < n; ++i)
      out.values.push_back(scale * (n == 1 ? start : start + (stop - start) * i / (n - 1)));
  } else {
    while (!body.empty()) {
      const auto comma = body.find(',');
      out.values.push_back(scale * number(body.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  }
  if (out.values.empty()) throw Error(ErrorCode::Config, "sweep axis has no values");
  return out;
}

/// `strict_distances` = false falls back to (|C6'|/delta)^(1/6) for "auto"
/// distances when the signs do not match, so validation can still run.
inline ResolvedConfig resolve(const ConfigFile& cfg, bool strict_distances = true) {
  ResolvedConfig out;
  auto fail = [&](const std::string& key, const std::string& why) -> Error {
    const auto& e = cfg.entry(key);
    return Error(ErrorCode::Config, e.origin + ": " + key + " = " + e.value + ": " + why);
  };
  auto number = [&](const std::string& key) {
    const auto v = detail::parse_number(cfg.value(key));
    if (!v) throw fail(key, "not a finite number");
    return *v;
  };
  auto optional_number = [&](const std::string& key) -> std::optional<double> {
    if (cfg.value(key) == "none") return std::nullopt;
    return number(key);
  };
  auto boolean = [&](const std::string& key) {
    const auto& v = cfg.value(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw fail(key, "expected true or false");
  };
  auto positive = [&](const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0)) throw fail(key, "must be positive");
    return v;
  };

  SystemParams& p = out.params;
  p.omega1 = angular_from_mhz(positive("omega1_mhz"));
  p.omega2 = angular_from_mhz(positive("omega2_mhz"));
  p.delta = angular_from_mhz(positive("delta_mhz"));
  const double gamma = number("gamma1_mhz");
  if (gamma < 0.0) throw fail("gamma1_mhz", "must be non-negative");
  p.gamma1 = angular_from_mhz(gamma);
  p.tau = number("tau_us");
  if (p.tau < 0.0) throw fail("tau_us", "must be non-negative");
  p.c6 = c6_from_ghz_um6(number("c6_ghz_um6"));
  p.c6_cross = c6_from_ghz_um6(number("c6_cross_ghz_um6"));

  auto distance = [&](const std::string& key) {
    if (cfg.value(key) != "auto") return positive(key);
    try {
      return matching_distance(p.c6_cross, p.delta);
    } catch (const Error& e) {
      if (strict_distances) throw fail(key, e.what());
      return std::pow(std::abs(p.c6_cross) / p.delta, 1.0 / 6.0);
    }
  };
  p.r_pair = {distance("r12_um"), distance("r13_um"), distance("r23_um")};

  RunConfig& run = out.run;
  const auto& model = cfg.value("model");
  if (model == "full") run.model = Model::full;
  else if (model == "effective") run.model = Model::effective;
  else throw fail("model", "expected full or effective");
  const double cycles = number("cycles");
  if (cycles < 1 || cycles != std::round(cycles)) throw fail("cycles", "must be a positive integer");
  run.n_cycles = static_cast<int>(cycles);
  try {
    run.initial = parse_initial_preset(cfg.value("initial_state"));
  } catch (const Error& e) {
    throw fail("initial_state", e.what());
  }
  const auto& record = cfg.value("record");
  if (record == "per_step") run.record = Record::per_step;
  else if (record == "per_substep") run.record = Record::per_substep;
  else throw fail("record", "expected per_step or per_substep");
  const double substeps = number("substeps");
  if (substeps < 1 || substeps != std::round(substeps)) throw fail("substeps", "must be a positive integer");
  run.substeps = static_cast<int>(substeps);
  run.drives = boolean("drives");
  run.stark_compensation = boolean("stark_compensation");
  run.coherent_decay = boolean("coherent_decay");

  out.errors.delta_r = number("delta_r_um");
  out.errors.delta_t_rel = number("delta_t_rel");
  out.errors.doppler = angular_from_mhz(number("doppler_mhz"));
  if (!(out.errors.delta_t_rel >= -0.5 && out.errors.delta_t_rel <= 0.5)) throw fail("delta_t_rel", "must lie in [-0.5, 0.5]");
  if (!p.r_pair.offset(out.errors.delta_r).all_positive()) throw fail("delta_r_um", "makes a pair distance non-positive");

  out.thermal.temperature_uk = positive("temperature_uk");
  out.thermal.trap_omega = angular_from_mhz(positive("trap_freq_mhz"));
  out.thermal.mass_kg = positive("atom_mass_u") * kAtomicMassUnit;
  out.thermal.k_eff_per_m = positive("k_eff_per_m");
  out.k_eff_resonant_per_m = positive("k_eff_resonant_per_m");

  const auto oa = optional_number("omega_a_mhz"), ob = optional_number("omega_b_mhz");
  const auto d1 = optional_number("delta1_mhz"), d2 = optional_number("delta2_mhz");
  if (oa || ob || d1 || d2) {
    if (!(oa && ob && d1 && d2))
      throw fail("omega_a_mhz", "two-photon inputs need all of omega_a_mhz, omega_b_mhz, delta1_mhz, delta2_mhz");
    out.two_photon = TwoPhotonParams{angular_from_mhz(*oa), angular_from_mhz(*ob), angular_from_mhz(*d1),
                                     angular_from_mhz(*d2), p.delta};
  }

  auto axis = [&](const std::string& key) -> std::optional<SweepAxis> {
    if (cfg.value(key) == "none") return std::nullopt;
    try {
      return parse_axis_spec(cfg.value(key));
    } catch (const Error& e) {
      throw fail(key, e.what());
    }
  };
  out.axis1 = axis("sweep_axis1");
  out.axis2 = axis("sweep_axis2");
  if (out.axis2 && !out.axis1) throw fail("sweep_axis2", "set without sweep_axis1");
  const double workers = number("workers");
  if (workers < 1 || workers != std::round(workers)) throw fail("workers", "must be a positive integer");
  out.workers = static_cast<unsigned>(workers);

  for (const auto& [key, entry] : cfg.entries()) out.echo[key] = entry.value;
  out.echo["r12_um"] = detail::format_number(p.r_pair.r12);
  out.echo["r13_um"] = detail::format_number(p.r_pair.r13);
  out.echo["r23_um"] = detail::format_number(p.r_pair.r23);
  return out;
}

}  // namespace qpump
