#pragma once

#include <qpump/model.hpp>

#include <cmath>
#include <cstdint>

namespace qpump {

/// sum_k |k>^{(x) n} / sqrt(d), with each particle embedded in a local space
/// of dimension `local_dim` (>= d). ghz_state(3, 3, 5) is the register target.
inline Ket ghz_state(int n, int d, int local_dim = 0) {
  if (local_dim == 0) local_dim = d;
  if (n < 2 || d < 2) throw Error(ErrorCode::InvalidParams, "GHZ state needs n >= 2 and d >= 2");
  if (local_dim < d) throw Error(ErrorCode::DimOverflow, "local dimension smaller than qudit dimension");
  std::int64_t dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= local_dim;
    if (dim > (std::int64_t{1} << 24)) throw Error(ErrorCode::DimOverflow, "GHZ state too large");
  }
  Ket v = Ket::Zero(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    std::int64_t idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * local_dim + k;
    v(idx) = amp;
  }
  return v;
}

/// |GHZ(3,3)> over the ground levels of the 125-dimensional register.
inline Ket register_ghz() { return ghz_state(kAtoms, kGroundLevels, kLevels); }

struct SubspaceProjectors {
  CMatrix proj_a;  ///< target state, rank 1
  CMatrix proj_b;  ///< rest of span{|000>,|111>,|222>}, rank 2
  CMatrix proj_c;  ///< remaining 24 ground configurations
  CMatrix ground;  ///< rank 27
};

inline const SubspaceProjectors& subspace_projectors() {
  static const SubspaceProjectors projectors = [] {
    const int i000 = register_index(Level::g0, Level::g0, Level::g0);
    const int i111 = register_index(Level::g1, Level::g1, Level::g1);
    const int i222 = register_index(Level::g2, Level::g2, Level::g2);
    Ket b1 = Ket::Zero(kRegisterDim), b2 = Ket::Zero(kRegisterDim);
    b1(i222) = 2.0 / std::sqrt(6.0);
    b1(i000) = -1.0 / std::sqrt(6.0);
    b1(i111) = -1.0 / std::sqrt(6.0);
    b2(i000) = 1.0 / std::sqrt(2.0);
    b2(i111) = -1.0 / std::sqrt(2.0);

    SubspaceProjectors p;
    p.ground = CMatrix::Zero(kRegisterDim, kRegisterDim);
    for (int idx : ground_indices()) p.ground(idx, idx) = 1.0;
    p.proj_a = projector(register_ghz());
    p.proj_b = projector(b1) + projector(b2);
    p.proj_c = p.ground - p.proj_a - p.proj_b;
    return p;
  }();
  return projectors;
}

/// <GHZ|rho|GHZ>
inline double fidelity(const CMatrix& rho) {
  static const Ket ghz = register_ghz();
  return ghz.dot(rho * ghz).real();
}

/// Tr(rho^2) for Hermitian rho.
inline double purity(const CMatrix& rho) { return rho.cwiseAbs2().sum(); }

/// Ground-space populations split by subspace, plus the Rydberg sector: any
/// configuration with an atom in |r-> counts toward r_minus, the rest of the
/// Rydberg sector (at least one |r+>, no |r->) toward r_plus. The five
/// components partition the register, so they sum to Tr(rho).
struct Populations {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r_plus = 0.0;
  double r_minus = 0.0;

  [[nodiscard]] double total() const { return a + b + c + r_plus + r_minus; }
};

inline Populations subspace_populations(const CMatrix& rho) {
  const auto& p = subspace_projectors();
  Populations out;
  auto tr = [&](const CMatrix& proj) { return (proj.cwiseProduct(rho.transpose())).sum().real(); };
  out.a = fidelity(rho);
  out.b = tr(p.proj_b);
  double ground = 0.0;
  for (int idx : ground_indices()) ground += rho(idx, idx).real();
  out.c = ground - out.a - out.b;
  for (int idx = 0; idx < kRegisterDim; ++idx) {
    const auto lv = register_levels(idx);
    bool any_minus = false, any_plus = false;
    for (int l : lv) {
      any_minus |= l == level_index(Level::r_minus);
      any_plus |= l == level_index(Level::r_plus);
    }
    if (any_minus) out.r_minus += rho(idx, idx).real();
    else if (any_plus) out.r_plus += rho(idx, idx).real();
  }
  return out;
}

}  // namespace qpump
