#pragma once

// Dense complex linear algebra for Hermitian operators and density matrices
// on small tensor-product spaces (the largest operator here is 125x125).

#include <qpump/error.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

namespace qpump {

using Complex = std::complex<double>;
/// Row-major so that serialized matrices follow the canonical layout.
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Ket = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;

inline CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

inline Ket basis_ket(Eigen::Index dim, Eigen::Index i) {
  Ket v = Ket::Zero(dim);
  v(i) = 1.0;
  return v;
}

/// |u><v|
inline CMatrix outer(const Ket& u, const Ket& v) { return u * v.adjoint(); }

inline CMatrix projector(const Ket& v) { return outer(v, v); }

/// max_ij |M_ij - conj(M_ji)|
inline double hermiticity_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double tol = kHermitianTol) {
  return hermiticity_residual(m) <= tol;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  CMatrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

inline Ket kron(const Ket& a, const Ket& b) {
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Eigendecomposition h = V diag(values) V^dagger, values ascending.
struct Spectrum {
  RVector values;
  CMatrix vectors;

  [[nodiscard]] Eigen::Index dim() const { return values.size(); }
  [[nodiscard]] double max_abs_eigenvalue() const {
    return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  }
};

inline Spectrum herm_eig(const CMatrix& h) {
  if (h.rows() != h.cols())
    throw Error(ErrorCode::DimMismatch, "herm_eig expects a square matrix");
  const double residual = hermiticity_residual(h);
  if (residual > kHermitianTol)
    throw Error(ErrorCode::NotHermitian, "residual " + std::to_string(residual));
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalHealth, "Hermitian eigensolver did not converge");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

inline CMatrix unitary_from(const Spectrum& spec, double t) {
  Eigen::VectorXcd phases(spec.dim());
  for (Eigen::Index k = 0; k < spec.dim(); ++k)
    phases(k) = std::exp(Complex(0.0, -spec.values(k) * t));
  return spec.vectors * phases.asDiagonal() * spec.vectors.adjoint();
}

/// exp(-i h t) for Hermitian h, t in microseconds (h in rad/us).
inline CMatrix unitary_from(const CMatrix& h, double t) { return unitary_from(herm_eig(h), t); }

/// (1/2) sum |lambda_i(a - b)|
inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimMismatch, "trace_distance operands differ in shape");
  const Spectrum s = herm_eig(a - b);
  return 0.5 * s.values.cwiseAbs().sum();
}

// ---- tensor-product site operations --------------------------------------
//
// A register of `sites` subsystems each of dimension `local_dim`, site 0 most
// significant. These apply a local operator without materializing the full
// embedding, which keeps channel application at O(D^2 * local_dim).

struct SiteLayout {
  Eigen::Index local_dim;
  Eigen::Index sites;

  [[nodiscard]] Eigen::Index dim() const {
    Eigen::Index d = 1;
    for (Eigen::Index s = 0; s < sites; ++s) d *= local_dim;
    return d;
  }
  [[nodiscard]] Eigen::Index stride(Eigen::Index site) const {
    Eigen::Index st = 1;
    for (Eigen::Index s = site + 1; s < sites; ++s) st *= local_dim;
    return st;
  }
};

/// I x ... x op(site) x ... x I
inline CMatrix embed_site_operator(const CMatrix& op, Eigen::Index site, SiteLayout layout) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (Eigen::Index s = 0; s < layout.sites; ++s)
    out = kron(out, s == site ? op : identity(layout.local_dim));
  return out;
}

/// (op on site) * m
inline CMatrix apply_site_left(const CMatrix& op, Eigen::Index site, SiteLayout layout, const CMatrix& m) {
  const Eigen::Index d = layout.local_dim, st = layout.stride(site), dim = layout.dim();
  CMatrix out = CMatrix::Zero(dim, m.cols());
  for (Eigen::Index row = 0; row < dim; ++row) {
    const Eigen::Index level = (row / st) % d;
    const Eigen::Index base = row - level * st;
    for (Eigen::Index k = 0; k < d; ++k) {
      const Complex c = op(level, k);
      if (c == Complex(0.0)) continue;
      out.row(row) += c * m.row(base + k * st);
    }
  }
  return out;
}

/// m * (op on site)^dagger
inline CMatrix apply_site_right_adjoint(const CMatrix& op, Eigen::Index site, SiteLayout layout,
                                        const CMatrix& m) {
  const Eigen::Index d = layout.local_dim, st = layout.stride(site), dim = layout.dim();
  CMatrix out = CMatrix::Zero(m.rows(), dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Eigen::Index level = (col / st) % d;
    const Eigen::Index base = col - level * st;
    for (Eigen::Index k = 0; k < d; ++k) {
      const Complex c = std::conj(op(level, k));
      if (c == Complex(0.0)) continue;
      out.col(col) += c * m.col(base + k * st);
    }
  }
  return out;
}

}  // namespace qpump
