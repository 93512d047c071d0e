#pragma once

// Physical model of the three-atom register: level scheme, parameters, the
// six pump steps, full and effective step Hamiltonians, the decay channel and
// the closed-form derived quantities (effective Rabi frequencies, matching
// distance, thermal spreads, schedule timing).
//
// Units: angular frequencies in rad/us, times in us, distances in um,
// dispersion coefficients in rad/us * um^6, hbar = 1.

#include <qpump/qops.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qpump {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kRb87MassU = 86.909;

/// nu [MHz] -> omega [rad/us]
inline constexpr double angular_from_mhz(double nu_mhz) { return kTwoPi * nu_mhz; }
inline constexpr double mhz_from_angular(double omega) { return omega / kTwoPi; }
/// C6/(2 pi) [GHz um^6] -> C6 [rad/us um^6]
inline constexpr double c6_from_ghz_um6(double c6_ghz) { return kTwoPi * 1e3 * c6_ghz; }

// ---- level scheme -----------------------------------------------------------

enum class Level : int { g0 = 0, g1 = 1, g2 = 2, r_plus = 3, r_minus = 4 };

inline constexpr int kLevels = 5;
inline constexpr int kAtoms = 3;
inline constexpr int kGroundLevels = 3;
inline constexpr int kRegisterDim = kLevels * kLevels * kLevels;  // 125
inline constexpr int kGroundDim = kGroundLevels * kGroundLevels * kGroundLevels;  // 27
inline constexpr SiteLayout kRegisterLayout{kLevels, kAtoms};

inline constexpr std::array<Level, kLevels> level_basis() {
  return {Level::g0, Level::g1, Level::g2, Level::r_plus, Level::r_minus};
}

inline constexpr int level_index(Level l) { return static_cast<int>(l); }

inline constexpr bool is_ground(int level) { return level < kGroundLevels; }

/// Atom 1 is the most significant digit.
inline constexpr int register_index(Level a, Level b, Level c) {
  return level_index(a) * kLevels * kLevels + level_index(b) * kLevels + level_index(c);
}

inline constexpr std::array<int, kAtoms> register_levels(int index) {
  return {index / (kLevels * kLevels), (index / kLevels) % kLevels, index % kLevels};
}

inline Ket level_ket(Level l) { return basis_ket(kLevels, level_index(l)); }

/// Embeds a 27-dimensional three-qutrit vector into the 125-dimensional register.
inline Ket embed_ground(const Ket& ground) {
  if (ground.size() != kGroundDim)
    throw Error(ErrorCode::DimMismatch, "ground-space vector must have 27 components");
  Ket out = Ket::Zero(kRegisterDim);
  for (int i = 0; i < kGroundLevels; ++i)
    for (int j = 0; j < kGroundLevels; ++j)
      for (int k = 0; k < kGroundLevels; ++k)
        out(i * 25 + j * 5 + k) = ground(i * 9 + j * 3 + k);
  return out;
}

/// Register indices of the 27 ground configurations in ground-space order.
inline std::array<int, kGroundDim> ground_indices() {
  std::array<int, kGroundDim> idx{};
  int n = 0;
  for (int i = 0; i < kGroundLevels; ++i)
    for (int j = 0; j < kGroundLevels; ++j)
      for (int k = 0; k < kGroundLevels; ++k) idx[n++] = i * 25 + j * 5 + k;
  return idx;
}

// ---- parameters ---------------------------------------------------------------

struct PairDistances {
  double r12 = 0.0;
  double r13 = 0.0;
  double r23 = 0.0;

  static constexpr PairDistances uniform(double r) { return {r, r, r}; }

  /// Atoms numbered 0..2.
  [[nodiscard]] constexpr double between(int a, int b) const {
    if (a > b) std::swap(a, b);
    if (a == 0 && b == 1) return r12;
    if (a == 0 && b == 2) return r13;
    return r23;
  }
  [[nodiscard]] constexpr PairDistances offset(double dr) const { return {r12 + dr, r13 + dr, r23 + dr}; }
  [[nodiscard]] constexpr bool all_positive() const { return r12 > 0.0 && r13 > 0.0 && r23 > 0.0; }
};

struct SystemParams {
  double omega1 = 0.0;    ///< rad/us, far-detuned drive to |r->
  double omega2 = 0.0;    ///< rad/us, resonant pump to |r+>
  double delta = 0.0;     ///< rad/us, detuning of |r->
  double gamma1 = 0.0;    ///< rad/us, |r+> decay rate
  double tau = 0.0;       ///< us, dissipation time per step
  double c6 = 0.0;        ///< rad/us um^6, same-species dispersion coefficient
  double c6_cross = 0.0;  ///< rad/us um^6, |r+>|r-> dispersion coefficient
  PairDistances r_pair;   ///< um

  /// Throws InvalidParams on any sign violation.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw Error(ErrorCode::InvalidParams, what);
    };
    require(omega1 > 0.0, "omega1 must be positive");
    require(omega2 > 0.0, "omega2 must be positive");
    require(delta > 0.0, "delta must be positive");
    require(gamma1 >= 0.0, "gamma1 must be non-negative");
    require(tau >= 0.0, "tau must be non-negative");
    require(r_pair.all_positive(), "pair distances must be positive");
  }

  /// delta >= 10 omega1 and omega1 >= 10 omega2.
  [[nodiscard]] bool unconventional_pumping() const {
    return delta >= 10.0 * omega1 && omega1 >= 10.0 * omega2;
  }
};

/// Two-photon couplings through the intermediate state, used to derive the
/// effective single-photon Rabi frequencies.
struct TwoPhotonParams {
  double omega_a = 0.0;
  double omega_b = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta = 0.0;
};

struct ThermalParams {
  double temperature_uk = 10.0;
  double trap_omega = angular_from_mhz(0.09);  ///< rad/us
  double mass_kg = kRb87MassU * kAtomicMassUnit;
  double k_eff_per_m = 1.54e7;
};

// ---- derived quantities -------------------------------------------------------

inline double effective_rabi_1(const TwoPhotonParams& p) {
  if (p.delta2 == 0.0 || p.delta2 + p.delta == 0.0)
    throw Error(ErrorCode::DegenerateDetuning, "delta2 and delta2 + delta must be nonzero");
  return p.omega_a * p.omega_a * (2.0 * p.delta2 + p.delta) / (4.0 * p.delta2 * (p.delta2 + p.delta));
}

inline double effective_rabi_2(double omega_b, double delta1) {
  if (delta1 == 0.0) throw Error(ErrorCode::DegenerateDetuning, "delta1 must be nonzero");
  return omega_b * omega_b / (2.0 * delta1);
}

/// Distance R0 with c6_cross / R0^6 = -delta.
inline double matching_distance(double c6_cross, double delta) {
  const double ratio = c6_cross / (-delta);
  if (!(ratio > 0.0))
    throw Error(ErrorCode::SignMismatch, "c6_cross and -delta must share a sign");
  return std::pow(ratio, 1.0 / 6.0);
}

/// Interatomic-distance spread sqrt(2 kB T / (omega^2 m)) in nm.
inline double thermal_sigma_nm(const ThermalParams& p) {
  const double omega_si = p.trap_omega * 1e6;
  const double t_kelvin = p.temperature_uk * 1e-6;
  return std::sqrt(2.0 * kBoltzmann * t_kelvin / (omega_si * omega_si * p.mass_kg)) * 1e9;
}

/// Doppler standard deviation k_eff sqrt(kB T / m) in rad/us.
inline double doppler_sigma(const ThermalParams& p) {
  const double t_kelvin = p.temperature_uk * 1e-6;
  return p.k_eff_per_m * std::sqrt(kBoltzmann * t_kelvin / p.mass_kg) * 1e-6;
}

// ---- pump steps -----------------------------------------------------------------

struct StepSpec {
  int index = 1;                     ///< 1..6
  std::array<Complex, 3> drive{};    ///< |a^i> over |0>,|1>,|2>
  double alpha = 1.0;                ///< collective enhancement factor
  double duration = 0.0;             ///< us

  /// |a^i> as a single-atom 5-level ket.
  [[nodiscard]] Ket drive_ket() const {
    Ket v = Ket::Zero(kLevels);
    for (int l = 0; l < kGroundLevels; ++l) v(l) = drive[l];
    return v;
  }
};

/// Steps 1-3 drive |0>,|1>,|2> for pi/omega2; steps 4-6 drive the pairwise
/// differences with alpha = sqrt(2) for pi/(sqrt(2) omega2).
inline std::array<StepSpec, 6> step_table(const SystemParams& params) {
  const double s = 1.0 / std::numbers::sqrt2;
  const double single = std::numbers::pi / params.omega2;
  const double collective = std::numbers::pi / (std::numbers::sqrt2 * params.omega2);
  return {{
      {1, {1.0, 0.0, 0.0}, 1.0, single},
      {2, {0.0, 1.0, 0.0}, 1.0, single},
      {3, {0.0, 0.0, 1.0}, 1.0, single},
      {4, {s, -s, 0.0}, std::numbers::sqrt2, collective},
      {5, {s, 0.0, -s}, std::numbers::sqrt2, collective},
      {6, {0.0, s, -s}, std::numbers::sqrt2, collective},
  }};
}

/// Sum of the six coherent durations plus six dissipation windows.
inline double cycle_duration(const SystemParams& params) {
  double total = 6.0 * params.tau;
  for (const StepSpec& s : step_table(params)) total += s.duration;
  return total;
}

// ---- Hamiltonians -----------------------------------------------------------------

struct FullModelOptions {
  /// Zeroes both laser couplings, leaving only level energies and interactions.
  bool drives = true;
  /// Adds -(alpha omega1)^2/(4 delta) |a><a| per atom, cancelling the
  /// second-order light shift the far-detuned |r-> coupling puts on |a^i>.
  /// Off by default: the literal step Hamiltonian has no such term.
  bool stark_compensation = false;
};

/// Literal step Hamiltonian over the 125-dimensional register. The
/// interaction term runs over ordered pairs (j, k != j), so each unordered
/// same-species pair picks up -c6/R^6 and each ordered |r+>_j|r->_k pair
/// picks up -c6_cross/R^6. `doppler` shifts |r+> by -doppler on every atom.
inline CMatrix build_full_hamiltonian(const StepSpec& step, const SystemParams& params,
                                      double doppler = 0.0, const FullModelOptions& opts = {}) {
  if (!params.r_pair.all_positive())
    throw Error(ErrorCode::InvalidParams, "pair distances must be positive");

  const Ket a = step.drive_ket();
  const Ket rp = level_ket(Level::r_plus);
  const Ket rm = level_ket(Level::r_minus);

  CMatrix local = CMatrix::Zero(kLevels, kLevels);
  if (opts.drives) {
    const CMatrix drive = 0.5 * step.alpha * (params.omega1 * outer(rm, a) + params.omega2 * outer(rp, a));
    local += drive + drive.adjoint();
  }
  local -= params.delta * projector(rm);
  local -= doppler * projector(rp);
  if (opts.stark_compensation) {
    const double shift = step.alpha * step.alpha * params.omega1 * params.omega1 / (4.0 * params.delta);
    local -= shift * projector(a);
  }

  CMatrix h = CMatrix::Zero(kRegisterDim, kRegisterDim);
  for (int j = 0; j < kAtoms; ++j) h += embed_site_operator(local, j, kRegisterLayout);

  // Interactions are diagonal in the product basis.
  for (int idx = 0; idx < kRegisterDim; ++idx) {
    const auto lv = register_levels(idx);
    double energy = 0.0;
    for (int j = 0; j < kAtoms; ++j) {
      for (int k = 0; k < kAtoms; ++k) {
        if (k == j) continue;
        const double r6 = std::pow(params.r_pair.between(j, k), 6);
        const bool jp = lv[j] == level_index(Level::r_plus), jm = lv[j] == level_index(Level::r_minus);
        const bool kp = lv[k] == level_index(Level::r_plus), km = lv[k] == level_index(Level::r_minus);
        if ((jp && kp) || (jm && km)) energy -= params.c6 / (2.0 * r6);
        if (jp && km) energy -= params.c6_cross / r6;
      }
    }
    h(idx, idx) += energy;
  }
  return h;
}

/// Effective pump Hamiltonian: atom j is driven |a> -> |r+> only while every
/// other atom sits in the ground-space complement of |a>. Rows and columns
/// touching |r-> vanish.
inline CMatrix build_effective_hamiltonian(const StepSpec& step, const SystemParams& params) {
  const Ket a = step.drive_ket();
  CMatrix complement = CMatrix::Zero(kLevels, kLevels);
  complement.topLeftCorner(kGroundLevels, kGroundLevels).setIdentity();
  complement -= projector(a);
  const CMatrix raise = outer(level_ket(Level::r_plus), a);

  CMatrix h = CMatrix::Zero(kRegisterDim, kRegisterDim);
  for (int j = 0; j < kAtoms; ++j) {
    CMatrix term = CMatrix::Identity(1, 1);
    for (int s = 0; s < kAtoms; ++s) term = kron(term, s == j ? raise : complement);
    h += term;
  }
  h *= 0.5 * step.alpha * params.omega2;
  return h + h.adjoint().eval();
}

// ---- decay channel -------------------------------------------------------------------

/// Single-atom Kraus set for |r+> decay over time t with uniform branching to
/// the three ground levels. |r-> does not decay. At zero decay probability
/// the set collapses to {I}.
inline std::vector<CMatrix> decay_kraus(const SystemParams& params, double t) {
  if (t < 0.0) throw Error(ErrorCode::InvalidParams, "decay time must be non-negative");
  if (params.gamma1 < 0.0) throw Error(ErrorCode::InvalidParams, "gamma1 must be non-negative");
  const double survival = std::exp(-params.gamma1 * t);
  CMatrix keep = identity(kLevels);
  keep(level_index(Level::r_plus), level_index(Level::r_plus)) = std::sqrt(survival);
  std::vector<CMatrix> ops{keep};
  const double p = 1.0 - survival;
  if (p > 0.0) {
    const double amp = std::sqrt(p / 3.0);
    for (int l = 0; l < kGroundLevels; ++l) {
      CMatrix k = CMatrix::Zero(kLevels, kLevels);
      k(l, level_index(Level::r_plus)) = amp;
      ops.push_back(std::move(k));
    }
  }
  return ops;
}

/// Three-atom tensor extension of decay_kraus: every product K_a x K_b x K_c.
inline std::vector<CMatrix> decay_kraus_register(const SystemParams& params, double t) {
  const auto single = decay_kraus(params, t);
  std::vector<CMatrix> ops;
  ops.reserve(single.size() * single.size() * single.size());
  for (const auto& a : single)
    for (const auto& b : single)
      for (const auto& c : single) ops.push_back(kron(kron(a, b), c));
  return ops;
}

/// Register-level Lindblad operators sqrt(gamma1/3) |l><r+| on each atom.
inline std::vector<CMatrix> decay_jump_operators(const SystemParams& params) {
  std::vector<CMatrix> jumps;
  const double amp = std::sqrt(params.gamma1 / 3.0);
  for (int j = 0; j < kAtoms; ++j) {
    for (int l = 0; l < kGroundLevels; ++l) {
      CMatrix local = CMatrix::Zero(kLevels, kLevels);
      local(l, level_index(Level::r_plus)) = amp;
      jumps.push_back(embed_site_operator(local, j, kRegisterLayout));
    }
  }
  return jumps;
}

// ---- presets -----------------------------------------------------------------------

/// Reference configuration: omega1 = 2pi x 4 MHz, omega2 = 2pi x 0.04 MHz,
/// delta = 2pi x 200 MHz, gamma1 = 2pi x 0.23 MHz, tau = 3.19 us,
/// C6/2pi = -4160 GHz um^6, C6'/2pi = -4213 GHz um^6, all pairs at R0.
inline SystemParams fig3_params() {
  SystemParams p;
  p.omega1 = angular_from_mhz(4.0);
  p.omega2 = angular_from_mhz(0.04);
  p.delta = angular_from_mhz(200.0);
  p.gamma1 = angular_from_mhz(0.23);
  p.tau = 3.19;
  p.c6 = c6_from_ghz_um6(-4160.0);
  p.c6_cross = c6_from_ghz_um6(-4213.0);
  p.r_pair = PairDistances::uniform(matching_distance(p.c6_cross, p.delta));
  return p;
}

}  // namespace qpump
