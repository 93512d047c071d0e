#pragma once

// Density-matrix propagation under piecewise-constant generators.
//
// Coherent phases use exact spectral propagation, dissipation phases the
// closed-form Kraus channel of |r+> decay. lindblad_rk4 is a general
// fixed-step master-equation integrator kept for cross-validation.

#include <qpump/model.hpp>

#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace qpump {

inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPositivityTol = 1e-9;

struct StateHealth {
  double trace_error = 0.0;     ///< |Tr rho - 1|
  double min_eigenvalue = 0.0;
  double hermiticity = 0.0;     ///< max |rho - rho^dagger|

  [[nodiscard]] bool ok() const {
    return trace_error <= kTraceTol && min_eigenvalue >= -kPositivityTol && hermiticity <= kHermitianTol;
  }
};

inline StateHealth state_health(const CMatrix& rho) {
  StateHealth h;
  h.trace_error = std::abs(rho.trace() - Complex(1.0));
  h.hermiticity = hermiticity_residual(rho);
  const Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = solver.eigenvalues().minCoeff();
  return h;
}

class DensityMatrix {
 public:
  /// Validated construction: Hermitian, unit trace, positive semidefinite.
  static DensityMatrix from_matrix(CMatrix rho) {
    const StateHealth h = state_health(rho);
    if (!h.ok())
      throw Error(ErrorCode::InvalidParams,
                  "not a density matrix (trace error " + std::to_string(h.trace_error) + ", min eigenvalue " +
                      std::to_string(h.min_eigenvalue) + ")");
    return DensityMatrix(std::move(rho));
  }

  static DensityMatrix pure(const Ket& v) { return DensityMatrix(projector(v.normalized())); }

  /// For propagators whose output is valid by construction; health is
  /// checked where samples are recorded.
  static DensityMatrix assume_valid(CMatrix rho) { return DensityMatrix(std::move(rho)); }

  [[nodiscard]] const CMatrix& matrix() const { return rho_; }
  [[nodiscard]] Eigen::Index dim() const { return rho_.rows(); }
  [[nodiscard]] StateHealth health() const { return state_health(rho_); }

 private:
  explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {}
  CMatrix rho_;
};

inline CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

/// U rho U^dagger for a precomputed propagator.
inline DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u) {
  if (u.rows() != rho.dim()) throw Error(ErrorCode::DimMismatch, "propagator and state differ in dimension");
  const CMatrix out = u * rho.matrix() * u.adjoint();
  return DensityMatrix::assume_valid(hermitian_part(out));
}

inline DensityMatrix coherent_step(const DensityMatrix& rho, const Spectrum& spec, double t) {
  if (t < 0.0) throw Error(ErrorCode::InvalidParams, "evolution time must be non-negative");
  if (t == 0.0) return rho;
  return apply_unitary(rho, unitary_from(spec, t));
}

inline DensityMatrix coherent_step(const DensityMatrix& rho, const CMatrix& h, double t) {
  return coherent_step(rho, herm_eig(h), t);
}

/// sum_k K_k rho K_k^dagger with the K_k acting on one site of the register.
inline CMatrix apply_site_channel(const CMatrix& rho, const std::vector<CMatrix>& kraus, int site,
                                  SiteLayout layout = kRegisterLayout) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const CMatrix& k : kraus)
    out += apply_site_right_adjoint(k, site, layout, apply_site_left(k, site, layout, rho));
  return out;
}

/// Independent decay on each atom for the dissipation time params.tau.
inline DensityMatrix dissipation_step(const DensityMatrix& rho, const SystemParams& params) {
  const auto kraus = decay_kraus(params, params.tau);
  if (kraus.size() == 1) return rho;
  CMatrix m = rho.matrix();
  for (int atom = 0; atom < kAtoms; ++atom) m = apply_site_channel(m, kraus, atom);
  return DensityMatrix::assume_valid(hermitian_part(m));
}

// ---- master-equation integrator ----------------------------------------------

struct IntegratorConfig {
  double dt = 1e-3;       ///< us
  int record_stride = 1;  ///< observer call every `record_stride` steps
};

using RecordFn = std::function<void(double t, const CMatrix& rho)>;

/// Classical RK4 on d rho/dt = -i[H, rho] + sum_l (L rho L^dagger - {L^dagger L, rho}/2).
/// The step actually taken is t/ceil(t/dt), never larger than cfg.dt.
inline DensityMatrix lindblad_rk4(const DensityMatrix& rho, const CMatrix& h, const std::vector<CMatrix>& jumps,
                                  double t, const IntegratorConfig& cfg, const RecordFn& record = {}) {
  using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::StepTooLarge, "dt must be positive");
  if (cfg.record_stride < 1) throw Error(ErrorCode::InvalidParams, "record_stride must be positive");
  if (t < 0.0) throw Error(ErrorCode::InvalidParams, "evolution time must be non-negative");

  const double h_norm = herm_eig(h).max_abs_eigenvalue();
  if (h_norm > 0.0 && cfg.dt > 0.1 / h_norm)
    throw Error(ErrorCode::StepTooLarge,
                "dt " + std::to_string(cfg.dt) + " exceeds 0.1/|H| = " + std::to_string(0.1 / h_norm));
  if (t == 0.0) return rho;

  const Eigen::Index dim = rho.dim();
  CMatrix h_nh = h;
  std::vector<Sparse> l_ops;
  for (const CMatrix& l : jumps) {
    if (l.rows() != dim || l.cols() != dim) throw Error(ErrorCode::DimMismatch, "jump operator shape");
    h_nh -= Complex(0.0, 0.5) * (l.adjoint() * l);
    l_ops.push_back(l.sparseView());
  }
  const Sparse h_sparse = h_nh.sparseView();

  auto generator = [&](const CMatrix& r) {
    const CMatrix a = Complex(0.0, -1.0) * (h_sparse * r);
    CMatrix out = a + a.adjoint();
    for (const Sparse& l : l_ops) {
      const CMatrix lr = l * r;
      out += (l * lr.adjoint()).adjoint();
    }
    return out;
  };

  const auto steps = static_cast<long>(std::ceil(t / cfg.dt - 1e-9));
  const double step = t / static_cast<double>(steps);
  CMatrix r = rho.matrix();
  for (long n = 1; n <= steps; ++n) {
    const CMatrix k1 = generator(r);
    const CMatrix k2 = generator(r + 0.5 * step * k1);
    const CMatrix k3 = generator(r + 0.5 * step * k2);
    const CMatrix k4 = generator(r + step * k3);
    r += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double drift = hermiticity_residual(r);
    if (drift > 1e-8)
      throw Error(ErrorCode::NumericalHealth, "Hermiticity drift " + std::to_string(drift) + " in RK4");
    r = hermitian_part(r);
    if (record && n % cfg.record_stride == 0) record(step * static_cast<double>(n), r);
  }
  return DensityMatrix::assume_valid(std::move(r));
}

}  // namespace qpump
