#pragma once

// Structural invariants of the model and cross-checks between propagation
// backends. Each check reports a measured value against a fixed bound.

#include <qpump/dynamics.hpp>
#include <qpump/observables.hpp>

#include <Eigen/SVD>

#include <string>
#include <vector>

namespace qpump {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// max over the six steps of ||H_eff^(i) |GHZ>||.
inline double max_dark_state_norm(const SystemParams& params) {
  const Ket ghz = register_ghz();
  double worst = 0.0;
  for (const StepSpec& s : step_table(params))
    worst = std::max(worst, (build_effective_hamiltonian(s, params) * ghz).norm());
  return worst;
}

struct NullSpace {
  int dimension = 0;
  double ghz_overlap = 0.0;  ///< |<GHZ|v>| for the weakest singular direction
  Eigen::VectorXd singular_values;
};

/// Common kernel of the six effective Hamiltonians restricted to the
/// 27-dimensional ground space, by SVD of the stacked 750 x 27 matrix.
inline NullSpace common_ground_null_space(const SystemParams& params, double threshold = 1e-9) {
  const auto ground = ground_indices();
  Eigen::MatrixXcd stacked(6 * kRegisterDim, kGroundDim);
  int block = 0;
  for (const StepSpec& s : step_table(params)) {
    const CMatrix h = build_effective_hamiltonian(s, params);
    for (int c = 0; c < kGroundDim; ++c) stacked.block(block * kRegisterDim, c, kRegisterDim, 1) = h.col(ground[c]);
    ++block;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeFullV);
  NullSpace out;
  out.singular_values = svd.singularValues();
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) <= threshold) ++out.dimension;
  const Eigen::VectorXcd weakest = svd.matrixV().col(kGroundDim - 1);
  const Ket ghz27 = ghz_state(kAtoms, kGroundLevels);
  out.ghz_overlap = std::abs(ghz27.dot(weakest));
  return out;
}

/// max |sum K^dagger K - I| over the single-atom decay set.
inline double kraus_completeness_residual(const SystemParams& params, double t) {
  CMatrix sum = CMatrix::Zero(kLevels, kLevels);
  for (const CMatrix& k : decay_kraus(params, t)) sum += k.adjoint() * k;
  return (sum - identity(kLevels)).cwiseAbs().maxCoeff();
}

/// Largest |H_diag| / delta over configurations with |r+> on atom j, |r-> on
/// atom k and the third atom in a ground level (interaction and detuning only).
inline double matching_cancellation_residual(const SystemParams& params) {
  const CMatrix h = build_full_hamiltonian(step_table(params)[0], params, 0.0, FullModelOptions{false, false});
  double worst = 0.0;
  for (int idx = 0; idx < kRegisterDim; ++idx) {
    const auto lv = register_levels(idx);
    int plus = 0, minus = 0, ground = 0;
    for (int l : lv) {
      plus += l == level_index(Level::r_plus);
      minus += l == level_index(Level::r_minus);
      ground += is_ground(l);
    }
    if (plus == 1 && minus == 1 && ground == 1) worst = std::max(worst, std::abs(h(idx, idx).real()) / params.delta);
  }
  return worst;
}

/// Trace distance between RK4 with H = 0 and the analytic decay channel over tau.
inline double rk4_vs_kraus_distance(const SystemParams& params, const DensityMatrix& rho, double dt = 1e-3) {
  const CMatrix zero = CMatrix::Zero(kRegisterDim, kRegisterDim);
  const DensityMatrix numeric = lindblad_rk4(rho, zero, decay_jump_operators(params), params.tau, {dt, 1});
  return trace_distance(numeric.matrix(), dissipation_step(rho, params).matrix());
}

/// Trace distance between RK4 without jumps and spectral propagation over one
/// step-1 duration of the effective model.
inline double rk4_vs_spectral_distance(const SystemParams& params, const DensityMatrix& rho, double dt = 1e-2) {
  const StepSpec s = step_table(params)[0];
  const CMatrix h = build_effective_hamiltonian(s, params);
  const DensityMatrix numeric = lindblad_rk4(rho, h, {}, s.duration, {dt, 1});
  return trace_distance(numeric.matrix(), coherent_step(rho, h, s.duration).matrix());
}

/// The invariant suite behind `qpump validate`.
inline std::vector<CheckResult> run_invariant_suite(const SystemParams& params) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double bound, bool pass, std::string detail = {}) {
    out.push_back({std::move(name), pass, value, bound, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      add(name, 0.0, 0.0, false, e.what());
    }
  };

  guarded("hamiltonians_hermitian", [&] {
    double worst = 0.0;
    for (const StepSpec& s : step_table(params)) {
      worst = std::max(worst, hermiticity_residual(build_full_hamiltonian(s, params)));
      worst = std::max(worst, hermiticity_residual(build_effective_hamiltonian(s, params)));
    }
    add("hamiltonians_hermitian", worst, 1e-12, worst <= 1e-12);
  });
  guarded("dark_state_norm", [&] {
    const double v = max_dark_state_norm(params);
    add("dark_state_norm", v, 1e-12, v <= 1e-12);
  });
  guarded("null_space_unique", [&] {
    const NullSpace ns = common_ground_null_space(params);
    add("null_space_unique", ns.dimension, 1.0, ns.dimension == 1, "dimension at singular-value threshold 1e-9");
    add("null_space_is_ghz", ns.ghz_overlap, 1.0 - 1e-9, ns.ghz_overlap >= 1.0 - 1e-9, "|<GHZ|v>|");
  });
  guarded("kraus_completeness", [&] {
    double worst = 0.0;
    for (double t : {0.0, params.tau, 0.1, 10.0, 1e3}) worst = std::max(worst, kraus_completeness_residual(params, t));
    add("kraus_completeness", worst, 1e-12, worst <= 1e-12);
  });
  guarded("matching_distance", [&] {
    const double r0 = matching_distance(params.c6_cross, params.delta);
    add("matching_distance", r0, 0.0, r0 > 0.0, "um");
  });
  guarded("matching_cancellation", [&] {
    const double v = matching_cancellation_residual(params);
    add("matching_cancellation", v, 1e-9, v <= 1e-9, "relative to delta");
  });
  guarded("rk4_vs_kraus", [&] {
    const Ket rp = basis_ket(kRegisterDim, register_index(Level::r_plus, Level::g1, Level::r_plus));
    const Ket mix = (rp + register_ghz()).normalized();
    const double v = rk4_vs_kraus_distance(params, DensityMatrix::pure(mix));
    add("rk4_vs_kraus", v, 1e-8, v <= 1e-8, "trace distance");
  });
  guarded("rk4_vs_spectral", [&] {
    const Ket v0 = basis_ket(kRegisterDim, register_index(Level::g0, Level::g1, Level::g2));
    const double v = rk4_vs_spectral_distance(params, DensityMatrix::pure((v0 + register_ghz()).normalized()));
    add("rk4_vs_spectral", v, 1e-8, v <= 1e-8, "trace distance");
  });
  return out;
}

}  // namespace qpump
