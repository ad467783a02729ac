#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "fock.hpp"
#include "linopt.hpp"
#include "qfi.hpp"
#include "states.hpp"

namespace ncvar {

// Mean d_k = <R_k> and covariance V_kl = <{R_k - d_k, R_l - d_l}>; vacuum has
// V = identity.
struct GaussianState {
  RVector d;
  RMatrix V;
  int num_modes() const { return static_cast<int>(V.rows() / 2); }
};

struct WilliamsonData {
  RMatrix S;
  RVector nus;  // descending, one per mode
};

inline RMatrix omega(int n) {
  RMatrix o = RMatrix::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    o(2 * m, 2 * m + 1) = 1.0;
    o(2 * m + 1, 2 * m) = -1.0;
  }
  return o;
}

inline bool is_symplectic(const RMatrix& s, double tol = 1e-8) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) return false;
  RMatrix o = omega(static_cast<int>(s.rows() / 2));
  return (s * o * s.transpose() - o).cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

inline RMatrix sym_sqrt(const RMatrix& v, bool inverse) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(v);
  RVector w = es.eigenvalues();
  if (w.minCoeff() <= 0.0) throw UnphysicalState("covariance matrix is not positive definite");
  RVector f = w.cwiseSqrt();
  if (inverse) f = f.cwiseInverse().eval();
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
}

inline void check_covariance(const RMatrix& v) {
  if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0) {
    throw InvalidArgument("covariance must be a nonempty 2N x 2N matrix");
  }
  double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("covariance must be symmetric");
  }
}

}  // namespace detail

// V = S diag(nu_1, nu_1, ..., nu_N, nu_N) S^T. The symplectic eigenvalues are
// the positive half of the spectrum of i Omega V, obtained here from the
// Hermitian matrix i V^{-1/2} Omega V^{-1/2} (eigenvalues +-1/nu); its
// eigenvectors give the orthogonal normal-form basis O and S = V^{1/2} O D^{-1/2}.
inline WilliamsonData williamson(const RMatrix& v_in, double tol = 1e-8) {
  detail::check_covariance(v_in);
  RMatrix v = 0.5 * (v_in + v_in.transpose());
  int n = static_cast<int>(v.rows() / 2);
  RMatrix vh = detail::sym_sqrt(v, false);
  RMatrix vmh = detail::sym_sqrt(v, true);
  RMatrix a = vmh * omega(n) * vmh;
  CMatrix h = Complex(0.0, 1.0) * a.cast<Complex>();
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RMatrix o(2 * n, 2 * n);
  RVector nus(n);
  // Positive eigenvalues 1/nu sit at the top of the ascending spectrum; the
  // largest 1/nu is the smallest nu, so walk upward to get nu descending.
  for (int k = 0; k < n; ++k) {
    Eigen::Index idx = n + k;
    double inv_nu = es.eigenvalues()(idx);
    if (inv_nu <= 0.0) throw UnphysicalState("degenerate covariance matrix");
    nus(k) = 1.0 / inv_nu;
    CVector w = es.eigenvectors().col(idx);
    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    w *= std::conj(w(imax)) / std::abs(w(imax));
    RVector u = w.real() * std::sqrt(2.0);
    RVector vv = w.imag() * std::sqrt(2.0);
    o.col(2 * k) = vv;
    o.col(2 * k + 1) = u;
  }
  if (nus.minCoeff() < 1.0 - tol) {
    throw UnphysicalState("symplectic eigenvalue " + std::to_string(nus.minCoeff()) + " below 1");
  }
  RVector dinv(2 * n);
  for (int k = 0; k < n; ++k) dinv(2 * k) = dinv(2 * k + 1) = 1.0 / std::sqrt(nus(k));
  RMatrix s = vh * o * dinv.asDiagonal();
  return {s, nus};
}

inline RMatrix williamson_diagonal(const RVector& nus) {
  RVector d(2 * nus.size());
  for (Eigen::Index k = 0; k < nus.size(); ++k) d(2 * k) = d(2 * k + 1) = nus(k);
  return d.asDiagonal();
}

// Closed-form QFI matrix evaluated on a Williamson representative:
// F = 2 S^{-1} S^T V^{-1} S S^{-T} = 2 S^{-1} D^{-1} S^{-T}.
inline QfiMatrix gaussian_qfi_matrix(const WilliamsonData& w) {
  RMatrix sinv = w.S.inverse();
  RMatrix dinv = williamson_diagonal(w.nus).inverse();
  RMatrix f = 2.0 * sinv * dinv * sinv.transpose();
  return QfiMatrix(0.5 * (f + f.transpose()));
}

inline QfiMatrix gaussian_qfi_matrix(const RMatrix& v) { return gaussian_qfi_matrix(williamson(v)); }

// QFI matrix of the displacement generators X_mu computed directly:
// F = 2 Omega^T V^{-1} Omega = 2 S D^{-1} S^T.
inline QfiMatrix gaussian_qfi_matrix_direct(const RMatrix& v) {
  williamson(v);
  int n = static_cast<int>(v.rows() / 2);
  RMatrix o = omega(n);
  RMatrix f = 2.0 * o.transpose() * v.inverse() * o;
  return QfiMatrix(0.5 * (f + f.transpose()));
}

inline double gaussian_metrological_power(const WilliamsonData& w) {
  return std::max(gaussian_qfi_matrix(w).lambda_max() / 2.0 - 1.0, 0.0);
}

inline double gaussian_metrological_power(const RMatrix& v) {
  return gaussian_metrological_power(williamson(v));
}

inline double gaussian_metrological_power_direct(const RMatrix& v) {
  return std::max(gaussian_qfi_matrix_direct(v).lambda_max() / 2.0 - 1.0, 0.0);
}

// Single-mode squeezing G with M = max(e^{2G} - 1, 0): the log of the larger
// singular value of the Williamson S, reduced by the thermal factor, so that
// e^{2G} = e^{2r}/nu.
inline double single_mode_squeezing_G(const RMatrix& v) {
  if (v.rows() != 2 || v.cols() != 2) throw InvalidArgument("G is only defined here for one mode");
  WilliamsonData w = williamson(v);
  Eigen::JacobiSVD<RMatrix> svd(w.S);
  return std::log(svd.singularValues()(0)) - 0.5 * std::log(w.nus(0));
}

struct Classicality {
  bool classical;
  double margin;           // lambda_min(V) - 1
  bool multimode_extension;  // true when the multimode criterion was used
};

// Single mode: classical iff lambda_min(V) >= 1. For several modes the same
// test V >= identity is applied as the usual literature criterion and flagged.
inline Classicality gaussian_classicality(const RMatrix& v, double tol = 1e-12) {
  detail::check_covariance(v);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(v, Eigen::EigenvaluesOnly);
  double margin = es.eigenvalues()(0) - 1.0;
  return {margin >= -tol, margin, v.rows() > 2};
}

inline GaussianState apply_symplectic(const GaussianState& g, const RMatrix& s, const RVector& shift) {
  if (s.rows() != g.V.rows() || shift.size() != g.d.size()) {
    throw InvalidArgument("symplectic map does not match the state size");
  }
  if (!is_symplectic(s)) throw NotSymplectic("matrix is not symplectic");
  RMatrix v = s * g.V * s.transpose();
  return {s * g.d + shift, 0.5 * (v + v.transpose())};
}

// Heisenberg symplectic of the squeezer with xi = r e^{i theta}.
inline RMatrix squeeze_symplectic(double r, double theta) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  RMatrix rot(2, 2);
  rot << c, s, -s, c;  // (x', p') = rot (x, p)
  RMatrix d(2, 2);
  d << std::exp(-r), 0, 0, std::exp(r);
  return rot.transpose() * d * rot;
}

inline RVector displacement_shift(const std::vector<Complex>& alpha) {
  RVector v(2 * alpha.size());
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    v(2 * m) = std::sqrt(2.0) * alpha[m].real();
    v(2 * m + 1) = std::sqrt(2.0) * alpha[m].imag();
  }
  return v;
}

inline GaussianState gaussian_vacuum(int n) { return {RVector::Zero(2 * n), RMatrix::Identity(2 * n, 2 * n)}; }

inline GaussianState gaussian_from_linear_optics(const GaussianState& g, const LinOpticalUnitary& u) {
  return apply_symplectic(g, quadrature_symplectic(u.passive), displacement_shift(u.displacement));
}

// Moments of a Gaussian spec, computed analytically. Returns nullopt for
// non-Gaussian kinds.
inline std::optional<GaussianState> gaussian_from_spec(const StateSpec& spec) {
  spec.validate();
  int n = spec.modes;
  GaussianState g = gaussian_vacuum(n);
  switch (spec.kind) {
    case StateKind::vacuum:
      return g;
    case StateKind::coherent:
      g.d = displacement_shift(spec.alpha);
      return g;
    case StateKind::thermal:
      for (int m = 0; m < n; ++m) {
        g.V(2 * m, 2 * m) = g.V(2 * m + 1, 2 * m + 1) = 2.0 * spec.nbar[m] + 1.0;
      }
      return g;
    case StateKind::squeezed_vacuum:
    case StateKind::squeezed_thermal:
    case StateKind::squeezed_coherent: {
      double nu = spec.kind == StateKind::squeezed_thermal ? 2.0 * spec.nbar[0] + 1.0 : 1.0;
      RMatrix s = squeeze_symplectic(spec.r, spec.theta);
      g.V = nu * s * s.transpose();
      if (spec.kind == StateKind::squeezed_coherent) g.d = s * displacement_shift(spec.alpha);
      return g;
    }
    default:
      return std::nullopt;
  }
}

// First and second moments of a Fock-space state.
inline GaussianState gaussian_moments(const State& s) {
  const FockBasis& b = basis_of(s);
  std::vector<SparseOp> r = quadrature_ops(b);
  std::size_t n2 = r.size();
  GaussianState g{RVector(n2), RMatrix(n2, n2)};
  for (std::size_t k = 0; k < n2; ++k) g.d(k) = expectation(s, r[k]).real();
  for (std::size_t k = 0; k < n2; ++k) {
    for (std::size_t l = k; l < n2; ++l) {
      SparseOp anti = r[k] * r[l] + r[l] * r[k];
      double v = expectation(s, anti).real() - 2.0 * g.d(k) * g.d(l);
      g.V(k, l) = g.V(l, k) = v;
    }
  }
  return g;
}

// Squeezing at which a squeezed thermal state stops being classical.
inline double critical_squeezing(double nbar_th) { return 0.5 * std::log(2.0 * nbar_th + 1.0); }

}  // namespace ncvar
