#pragma once

// The six-step pump/dissipate cycle repeated over many cycles, with optional
// injection of distance, timing and Doppler errors.

#include <qpump/dynamics.hpp>
#include <qpump/observables.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qpump {

struct ErrorModel {
  double delta_r = 0.0;      ///< um, added to every pair distance
  double delta_t_rel = 0.0;  ///< relative error on every coherent duration
  double doppler = 0.0;      ///< rad/us, constant detuning of |r+>

  [[nodiscard]] bool injects_model_errors() const { return delta_r != 0.0 || doppler != 0.0; }

  void validate(const SystemParams& params) const {
    if (!(delta_t_rel >= -0.5 && delta_t_rel <= 0.5))
      throw Error(ErrorCode::InvalidParams, "delta_t_rel must lie in [-0.5, 0.5]");
    if (!params.r_pair.offset(delta_r).all_positive())
      throw Error(ErrorCode::InvalidParams, "distance offset makes a pair distance non-positive");
  }
};

enum class Model { full, effective };
enum class Record { per_step, per_substep };

inline std::string_view to_string(Model m) { return m == Model::full ? "full" : "effective"; }
inline std::string_view to_string(Record r) { return r == Record::per_step ? "per_step" : "per_substep"; }

/// mixed27 | ghz | basis(i,j,k)
struct InitialPreset {
  enum class Kind { mixed27, ghz, basis } kind = Kind::mixed27;
  std::array<int, 3> levels{0, 0, 0};

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::mixed27: return "mixed27";
      case Kind::ghz: return "ghz";
      case Kind::basis:
        return "basis(" + std::to_string(levels[0]) + "," + std::to_string(levels[1]) + "," +
               std::to_string(levels[2]) + ")";
    }
    return {};
  }
};

inline InitialPreset parse_initial_preset(std::string_view text) {
  if (text == "mixed27") return {InitialPreset::Kind::mixed27, {}};
  if (text == "ghz") return {InitialPreset::Kind::ghz, {}};
  if (text.starts_with("basis(") && text.ends_with(")")) {
    std::string_view body = text.substr(6, text.size() - 7);
    InitialPreset p{InitialPreset::Kind::basis, {}};
    for (int n = 0; n < 3; ++n) {
      const auto comma = body.find(',');
      const std::string_view tok = n < 2 ? body.substr(0, comma) : body;
      if ((n < 2 && comma == std::string_view::npos) || tok.size() != 1)
        throw Error(ErrorCode::UnknownPreset, std::string(text));
      const int v = tok[0] - '0';
      if (v < 0 || v >= kGroundLevels) throw Error(ErrorCode::UnknownPreset, std::string(text));
      p.levels[n] = v;
      if (n < 2) body.remove_prefix(comma + 1);
    }
    return p;
  }
  throw Error(ErrorCode::UnknownPreset, std::string(text));
}

inline DensityMatrix initial_state(const InitialPreset& preset) {
  switch (preset.kind) {
    case InitialPreset::Kind::mixed27: {
      CMatrix rho = CMatrix::Zero(kRegisterDim, kRegisterDim);
      for (int idx : ground_indices()) rho(idx, idx) = 1.0 / kGroundDim;
      return DensityMatrix::assume_valid(std::move(rho));
    }
    case InitialPreset::Kind::ghz: return DensityMatrix::pure(register_ghz());
    case InitialPreset::Kind::basis: {
      const auto& l = preset.levels;
      return DensityMatrix::pure(basis_ket(
          kRegisterDim, register_index(static_cast<Level>(l[0]), static_cast<Level>(l[1]), static_cast<Level>(l[2]))));
    }
  }
  throw Error(ErrorCode::UnknownPreset, "unhandled preset");
}

inline DensityMatrix initial_state(std::string_view preset) { return initial_state(parse_initial_preset(preset)); }

struct RunConfig {
  Model model = Model::effective;
  int n_cycles = 30;
  std::variant<InitialPreset, DensityMatrix> initial = InitialPreset{};
  Record record = Record::per_step;
  int substeps = 8;  ///< samples inside each coherent phase when recording per_substep
  /// Diagnostic: zero every laser coupling.
  bool drives = true;
  bool stark_compensation = false;
  /// Let |r+> decay during coherent phases too (RK4 backend, slow).
  bool coherent_decay = false;
  double rk4_dt = 0.0;  ///< 0 selects 0.005/|H|

  void validate() const {
    if (n_cycles < 1) throw Error(ErrorCode::InvalidParams, "n_cycles must be at least 1");
    if (substeps < 1) throw Error(ErrorCode::InvalidParams, "substeps must be at least 1");
  }
};

struct Sample {
  int cycle = 0;  ///< 0 for the initial state
  int step = 0;   ///< 1..6, 0 for the initial state
  double time = 0.0;
  double fidelity = 0.0;
  double purity = 0.0;
  Populations pops;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::optional<DensityMatrix> final_state;

  [[nodiscard]] const Sample& final_sample() const { return samples.back(); }

  /// Samples taken after the step-6 dissipation of each cycle, in order.
  [[nodiscard]] std::vector<Sample> cycle_boundaries() const {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Sample& s = samples[i];
      const bool last_of_cycle = s.step == 6 && (i + 1 == samples.size() || samples[i + 1].cycle != s.cycle ||
                                                 samples[i + 1].step != 6);
      if (last_of_cycle) out.push_back(s);
    }
    return out;
  }
};

/// Coherent durations after timing-error scaling.
inline std::array<double, 6> step_durations(const SystemParams& params, const ErrorModel& errors) {
  std::array<double, 6> out{};
  const auto steps = step_table(params);
  for (std::size_t i = 0; i < 6; ++i) out[i] = steps[i].duration * (1.0 + errors.delta_t_rel);
  return out;
}

inline double total_runtime(const RunConfig& cfg, const SystemParams& params, const ErrorModel& errors) {
  double per_cycle = 6.0 * params.tau;
  for (double d : step_durations(params, errors)) per_cycle += d;
  return cfg.n_cycles * per_cycle;
}

/// Step Hamiltonians with their spectra, built once per configuration and
/// reused across cycles. Timing errors do not enter here.
struct ProtocolGenerators {
  std::array<CMatrix, 6> hamiltonians;
  std::array<Spectrum, 6> spectra;
};

inline ProtocolGenerators prepare_generators(const RunConfig& cfg, const SystemParams& params,
                                             const ErrorModel& errors) {
  params.validate();
  errors.validate(params);
  if (cfg.model == Model::effective && errors.injects_model_errors())
    throw Error(ErrorCode::ModelMismatch, "distance and Doppler errors require the full model");

  SystemParams shifted = params;
  shifted.r_pair = params.r_pair.offset(errors.delta_r);
  const FullModelOptions opts{cfg.drives, cfg.stark_compensation};
  ProtocolGenerators gens;
  const auto steps = step_table(params);
  for (std::size_t i = 0; i < 6; ++i) {
    if (cfg.model == Model::full) {
      gens.hamiltonians[i] = build_full_hamiltonian(steps[i], shifted, errors.doppler, opts);
    } else {
      gens.hamiltonians[i] = cfg.drives ? build_effective_hamiltonian(steps[i], params)
                                        : CMatrix::Zero(kRegisterDim, kRegisterDim).eval();
    }
    gens.spectra[i] = herm_eig(gens.hamiltonians[i]);
  }
  return gens;
}

namespace detail {

inline Sample observe(const DensityMatrix& rho, int cycle, int step, double time) {
  const CMatrix& m = rho.matrix();
  const StateHealth h = rho.health();
  Sample s;
  s.cycle = cycle;
  s.step = step;
  s.time = time;
  s.fidelity = fidelity(m);
  s.purity = purity(m);
  s.pops = subspace_populations(m);
  s.trace_error = h.trace_error;
  s.min_eigenvalue = h.min_eigenvalue;
  if (!h.ok())
    throw Error(ErrorCode::NumericalHealth,
                "state left the physical set at cycle " + std::to_string(cycle) + " step " + std::to_string(step) +
                    " (trace error " + std::to_string(h.trace_error) + ", min eigenvalue " +
                    std::to_string(h.min_eigenvalue) + ")");
  return s;
}

}  // namespace detail

inline Trajectory run_protocol(const RunConfig& cfg, const SystemParams& params, const ErrorModel& errors,
                               const ProtocolGenerators& gens) {
  cfg.validate();
  params.validate();
  errors.validate(params);
  if (cfg.model == Model::effective && errors.injects_model_errors())
    throw Error(ErrorCode::ModelMismatch, "distance and Doppler errors require the full model");

  DensityMatrix rho = std::holds_alternative<DensityMatrix>(cfg.initial)
                          ? std::get<DensityMatrix>(cfg.initial)
                          : initial_state(std::get<InitialPreset>(cfg.initial));
  if (rho.dim() != kRegisterDim) throw Error(ErrorCode::DimMismatch, "initial state must be 125-dimensional");

  const auto durations = step_durations(params, errors);
  const bool dense = cfg.record == Record::per_substep;
  const std::vector<CMatrix> jumps = cfg.coherent_decay ? decay_jump_operators(params) : std::vector<CMatrix>{};

  // One propagator per step (or per sub-step when sampling densely).
  std::array<CMatrix, 6> props;
  for (std::size_t i = 0; i < 6; ++i)
    props[i] = unitary_from(gens.spectra[i], dense ? durations[i] / cfg.substeps : durations[i]);

  auto evolve = [&](const DensityMatrix& r, std::size_t i, double t) {
    if (!cfg.coherent_decay) return apply_unitary(r, props[i]);
    const double norm = gens.spectra[i].max_abs_eigenvalue();
    IntegratorConfig ic;
    ic.dt = cfg.rk4_dt > 0.0 ? cfg.rk4_dt : (norm > 0.0 ? 0.005 / norm : 0.01);
    return lindblad_rk4(r, gens.hamiltonians[i], jumps, t, ic);
  };

  Trajectory traj;
  double time = 0.0;
  traj.samples.push_back(detail::observe(rho, 0, 0, time));
  for (int cycle = 1; cycle <= cfg.n_cycles; ++cycle) {
    for (std::size_t i = 0; i < 6; ++i) {
      const int step = static_cast<int>(i) + 1;
      if (dense) {
        const double sub = durations[i] / cfg.substeps;
        for (int k = 0; k < cfg.substeps; ++k) {
          rho = evolve(rho, i, sub);
          traj.samples.push_back(detail::observe(rho, cycle, step, time + sub * (k + 1)));
        }
      } else {
        rho = evolve(rho, i, durations[i]);
      }
      time += durations[i];
      rho = dissipation_step(rho, params);
      time += params.tau;
      if (!dense || params.tau > 0.0) traj.samples.push_back(detail::observe(rho, cycle, step, time));
    }
  }
  traj.final_state = std::move(rho);
  return traj;
}

inline Trajectory run_protocol(const RunConfig& cfg, const SystemParams& params, const ErrorModel& errors) {
  return run_protocol(cfg, params, errors, prepare_generators(cfg, params, errors));
}

}  // namespace qpump
