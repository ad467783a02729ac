#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fock.hpp"

namespace ncvar {

inline constexpr double kEigenFloor = 1e-12;

// Support of a state: eigenvalues above the floor and their eigenvectors.
struct Spectrum {
  FockBasis basis;
  RVector weights;  // descending
  CMatrix vectors;  // dim x rank
  int rank() const { return static_cast<int>(weights.size()); }
};

inline Spectrum spectrum_of(const State& s, double tol = kEigenFloor) {
  if (const auto* psi = std::get_if<FockState>(&s)) {
    return {psi->basis(), RVector::Ones(1), psi->amplitudes()};
  }
  const auto& rho = std::get<DensityMatrix>(s);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  if (es.info() != Eigen::Success) throw Error("eigendecomposition of the density matrix failed");
  const RVector& w = es.eigenvalues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = w.size() - 1; i >= 0; --i) {
    if (w(i) > tol) keep.push_back(i);
  }
  Spectrum sp{rho.basis(), RVector(keep.size()), CMatrix(w.size(), keep.size())};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    sp.weights(k) = w(keep[k]);
    CVector v = es.eigenvectors().col(keep[k]);
    // Fix the eigenvector phase: largest component real positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::conj(v(imax)) / std::abs(v(imax));
    sp.vectors.col(k) = v;
  }
  return sp;
}

namespace detail {

// Support-restricted spectral QFI entry for generators given through
// B_k = A_k U_s and their support projections P_k = U_s^dag B_k.
inline double qfi_entry(const RVector& lam, const CMatrix& bk, const CMatrix& pk, const CMatrix& bl,
                        const CMatrix& pl) {
  const Eigen::Index r = lam.size();
  double inner = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      double s = lam(i) + lam(j);
      if (i == j || s < kEigenFloor) continue;
      double dl = lam(i) - lam(j);
      inner += dl * dl / s * std::real(pk(i, j) * std::conj(pl(i, j)));
    }
  }
  double outer = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    Complex full = bk.col(i).dot(bl.col(i));
    Complex in_support = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) in_support += pk(i, j) * pl(j, i);
    outer += lam(i) * std::real(full - in_support);
  }
  return 2.0 * inner + 4.0 * outer;
}

template <typename Op>
void check_hermitian(const Op& a) {
  double dev = 0.0, scale = 1.0;
  if constexpr (std::is_base_of_v<Eigen::SparseMatrixBase<Op>, Op>) {
    SparseOp diff = a - SparseOp(a.adjoint());
    if (diff.nonZeros() > 0) dev = diff.coeffs().cwiseAbs().maxCoeff();
    if (a.nonZeros() > 0) scale = std::max(1.0, SparseOp(a).coeffs().cwiseAbs().maxCoeff());
  } else {
    dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
    scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  }
  if (dev > 1e-9 * scale) throw NotHermitian("generator is not Hermitian");
}

}  // namespace detail

// I_F(rho, A) = 2 sum_{ij} (l_i - l_j)^2/(l_i + l_j) |<i|A|j>|^2, summed over
// pairs with l_i + l_j above the eigenvalue floor.
template <typename Op>
double spectral_qfi(const Spectrum& sp, const Op& a) {
  if (static_cast<std::size_t>(a.rows()) != sp.basis.dim() || a.rows() != a.cols()) {
    throw InvalidArgument("generator does not match the state dimension");
  }
  detail::check_hermitian(a);
  CMatrix b = a * sp.vectors;
  CMatrix p = sp.vectors.adjoint() * b;
  return std::max(0.0, detail::qfi_entry(sp.weights, b, p, b, p));
}

template <typename Op>
double spectral_qfi(const State& s, const Op& a) {
  return spectral_qfi(spectrum_of(s), a);
}

// Real symmetric QFI matrix with its spectrum sorted in descending order.
class QfiMatrix {
 public:
  explicit QfiMatrix(RMatrix f) : f_(std::move(f)) {
    if (f_.rows() != f_.cols() || f_.rows() % 2 != 0) throw InvalidArgument("QFI matrix must be 2N x 2N");
    double scale = std::max(1.0, f_.cwiseAbs().maxCoeff());
    if ((f_ - f_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw InvalidArgument("QFI matrix must be symmetric");
    }
    f_ = (0.5 * (f_ + f_.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(f_);
    Eigen::Index n = f_.rows();
    evals_.resize(n);
    evecs_.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      evals_(k) = es.eigenvalues()(n - 1 - k);
      evecs_.col(k) = es.eigenvectors().col(n - 1 - k);
    }
  }

  const RMatrix& matrix() const { return f_; }
  const RVector& eigenvalues() const { return evals_; }
  const RMatrix& eigenvectors() const { return evecs_; }
  int num_modes() const { return static_cast<int>(f_.rows() / 2); }
  double lambda_max() const { return evals_(0); }

  // Unit eigenvector of lambda_max. Within a degenerate top eigenspace the
  // projection of the lowest-index unit vector is taken, so the choice does
  // not depend on the eigensolver's basis.
  RVector optimal_direction() const {
    Eigen::Index n = f_.rows();
    double tol = 1e-8 * std::max(1.0, std::abs(evals_(0)));
    Eigen::Index k = 0;
    while (k + 1 < n && evals_(0) - evals_(k + 1) <= tol) ++k;
    RMatrix basis = evecs_.leftCols(k + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      RVector proj = basis * basis.row(i).transpose();
      double norm = proj.norm();
      if (norm > 1e-6) return proj / norm;
    }
    return evecs_.col(0);
  }

 private:
  RMatrix f_;
  RVector evals_;
  RMatrix evecs_;
};

inline QfiMatrix qfi_matrix(const Spectrum& sp) {
  std::vector<SparseOp> r = quadrature_ops(sp.basis);
  std::size_t n2 = r.size();
  std::vector<CMatrix> b(n2), p(n2);
  for (std::size_t k = 0; k < n2; ++k) {
    b[k] = r[k] * sp.vectors;
    p[k] = sp.vectors.adjoint() * b[k];
  }
  RMatrix f(n2, n2);
  for (std::size_t k = 0; k < n2; ++k) {
    for (std::size_t l = k; l < n2; ++l) {
      f(k, l) = f(l, k) = detail::qfi_entry(sp.weights, b[k], p[k], b[l], p[l]);
    }
  }
  return QfiMatrix(f);
}

inline QfiMatrix qfi_matrix(const State& s) { return qfi_matrix(spectrum_of(s)); }

inline double i_opt(const QfiMatrix& f) { return f.lambda_max() / 2.0; }

inline double i_mean(const QfiMatrix& f) { return f.matrix().trace() / (4.0 * f.num_modes()); }

inline RVector optimal_direction(const QfiMatrix& f) { return f.optimal_direction(); }

// X_mu = sum_k mu_k R_k for a unit direction mu.
inline SparseOp quadrature_along(const FockBasis& b, const RVector& mu) {
  if (mu.size() != 2 * b.num_modes()) throw InvalidArgument("direction must have 2N entries");
  if (std::abs(mu.norm() - 1.0) > 1e-12) throw InvalidArgument("direction must be a unit vector");
  std::vector<SparseOp> r = quadrature_ops(b);
  SparseOp x(b.dim(), b.dim());
  for (int k = 0; k < mu.size(); ++k) x += SparseOp(r[k] * Complex(mu(k)));
  return x;
}

struct MetrologicalPower {
  double value;      // M = max(lambda_max/2 - 1, 0)
  double lambda_max;
  RVector direction; // certificate: optimal generator direction
  double min_variance() const { return 1.0 / lambda_max; }
};

inline MetrologicalPower metrological_power(const QfiMatrix& f) {
  return {std::max(f.lambda_max() / 2.0 - 1.0, 0.0), f.lambda_max(), f.optimal_direction()};
}

inline MetrologicalPower metrological_power(const State& s) { return metrological_power(qfi_matrix(s)); }

}  // namespace ncvar
