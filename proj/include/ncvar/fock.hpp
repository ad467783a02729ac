#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "types.hpp"

namespace ncvar {

// Truncated multimode Fock basis. Modes are numbered from 0 and mode 0 is the
// slowest-varying index: |n_0, n_1, ..., n_{N-1}> sits at
// sum_m n_m * stride(m) with stride(N-1) = 1.
class FockBasis {
 public:
  FockBasis() = default;

  explicit FockBasis(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw InvalidArgument("FockBasis needs at least one mode");
    for (int d : cutoffs_) {
      if (d < 1) throw InvalidArgument("FockBasis cutoffs must be positive");
    }
    strides_.assign(cutoffs_.size(), 1);
    dim_ = 1;
    for (int m = static_cast<int>(cutoffs_.size()) - 1; m >= 0; --m) {
      strides_[m] = dim_;
      dim_ *= static_cast<std::size_t>(cutoffs_[m]);
      check_entries(dim_, "FockBasis dimension");
    }
  }

  FockBasis(int modes, int cutoff) : FockBasis(std::vector<int>(std::max(modes, 0), cutoff)) {}

  int num_modes() const { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(check_mode(mode)); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::size_t dim() const { return dim_; }
  std::size_t stride(int mode) const { return strides_.at(check_mode(mode)); }

  int occupation(std::size_t index, int mode) const {
    return static_cast<int>((index / strides_[mode]) % static_cast<std::size_t>(cutoffs_[mode]));
  }

  std::vector<int> occupations(std::size_t index) const {
    std::vector<int> occ(cutoffs_.size());
    for (int m = 0; m < num_modes(); ++m) occ[m] = occupation(index, m);
    return occ;
  }

  std::size_t index(const std::vector<int>& occ) const {
    if (occ.size() != cutoffs_.size()) throw InvalidArgument("occupation list has wrong length");
    std::size_t idx = 0;
    for (int m = 0; m < num_modes(); ++m) {
      if (occ[m] < 0 || occ[m] >= cutoffs_[m]) {
        throw InvalidArgument("occupation " + std::to_string(occ[m]) + " outside cutoff of mode " +
                              std::to_string(m));
      }
      idx += static_cast<std::size_t>(occ[m]) * strides_[m];
    }
    return idx;
  }

  int total_occupation(std::size_t index) const {
    int n = 0;
    for (int m = 0; m < num_modes(); ++m) n += occupation(index, m);
    return n;
  }

  FockBasis concat(const FockBasis& other) const {
    std::vector<int> c = cutoffs_;
    c.insert(c.end(), other.cutoffs_.begin(), other.cutoffs_.end());
    return FockBasis(std::move(c));
  }

  FockBasis subset(const std::vector<int>& modes) const {
    std::vector<int> c;
    for (int m : modes) c.push_back(cutoff(m));
    return FockBasis(std::move(c));
  }

  FockBasis enlarged(int delta) const {
    std::vector<int> c = cutoffs_;
    for (int& d : c) d += delta;
    return FockBasis(std::move(c));
  }

  int check_mode(int mode) const {
    if (mode < 0 || mode >= num_modes()) {
      throw InvalidArgument("mode " + std::to_string(mode) + " out of range for " +
                            std::to_string(num_modes()) + "-mode basis");
    }
    return mode;
  }

  bool operator==(const FockBasis& o) const { return cutoffs_ == o.cutoffs_; }
  bool operator!=(const FockBasis& o) const { return !(*this == o); }

 private:
  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
};

class FockState {
 public:
  FockState(FockBasis basis, CVector amplitudes, double tol_norm = 1e-10)
      : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != basis_.dim()) {
      throw InvalidArgument("amplitude vector does not match basis dimension");
    }
    double norm = amps_.norm();
    if (std::abs(norm - 1.0) > tol_norm) {
      throw InvalidArgument("state norm " + std::to_string(norm) + " deviates from 1");
    }
  }

  static FockState normalized(FockBasis basis, CVector amplitudes) {
    double norm = amplitudes.norm();
    if (norm == 0.0) throw InvalidArgument("cannot normalize the zero vector");
    return FockState(std::move(basis), amplitudes / norm);
  }

  static FockState basis_state(const FockBasis& basis, const std::vector<int>& occ) {
    CVector v = CVector::Zero(basis.dim());
    v(basis.index(occ)) = 1.0;
    return FockState(basis, std::move(v));
  }

  static FockState vacuum(const FockBasis& basis) {
    return basis_state(basis, std::vector<int>(basis.num_modes(), 0));
  }

  const FockBasis& basis() const { return basis_; }
  const CVector& amplitudes() const { return amps_; }

 private:
  FockBasis basis_;
  CVector amps_;
};

class DensityMatrix {
 public:
  DensityMatrix(FockBasis basis, CMatrix matrix, double trace_tol = 1e-8)
      : basis_(std::move(basis)), rho_(std::move(matrix)) {
    std::size_t d = basis_.dim();
    check_entries(d * d, "DensityMatrix");
    if (static_cast<std::size_t>(rho_.rows()) != d || static_cast<std::size_t>(rho_.cols()) != d) {
      throw InvalidArgument("density matrix does not match basis dimension");
    }
    double scale = std::max(1.0, rho_.cwiseAbs().maxCoeff());
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw NotHermitian("density matrix is not Hermitian");
    }
    rho_ = (0.5 * (rho_ + rho_.adjoint())).eval();
    double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > trace_tol) {
      throw InvalidArgument("density matrix trace " + std::to_string(tr) + " deviates from 1");
    }
  }

  static DensityMatrix from_pure(const FockState& psi) {
    const CVector& v = psi.amplitudes();
    return DensityMatrix(psi.basis(), v * v.adjoint());
  }

  // Rescales a positive matrix to unit trace.
  static DensityMatrix normalized(FockBasis basis, const CMatrix& m) {
    double tr = m.trace().real();
    if (!(tr > 0.0)) throw InvalidArgument("cannot normalize a matrix with nonpositive trace");
    return DensityMatrix(std::move(basis), m / tr);
  }

  const FockBasis& basis() const { return basis_; }
  const CMatrix& matrix() const { return rho_; }

  double purity() const { return (rho_ * rho_).trace().real(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }

 private:
  FockBasis basis_;
  CMatrix rho_;
};

using State = std::variant<FockState, DensityMatrix>;

inline const FockBasis& basis_of(const State& s) {
  return std::visit([](const auto& x) -> const FockBasis& { return x.basis(); }, s);
}

inline bool is_pure_type(const State& s) { return std::holds_alternative<FockState>(s); }

inline DensityMatrix to_density(const State& s) {
  if (const auto* psi = std::get_if<FockState>(&s)) return DensityMatrix::from_pure(*psi);
  return std::get<DensityMatrix>(s);
}

inline double purity(const State& s) {
  if (is_pure_type(s)) return 1.0;
  return std::get<DensityMatrix>(s).purity();
}

// Diagonal of the state in the Fock basis.
inline RVector populations(const State& s) {
  if (const auto* psi = std::get_if<FockState>(&s)) return psi->amplitudes().cwiseAbs2();
  return std::get<DensityMatrix>(s).matrix().diagonal().real();
}

// ---------------------------------------------------------------------------
// Operators on the full space

// Exact truncation of a_m: the top level of the mode is annihilated into
// nothing, so commutators fail on the last Fock level.
inline SparseOp annihilation_op(const FockBasis& basis, int mode) {
  basis.check_mode(mode);
  std::vector<Eigen::Triplet<Complex>> t;
  std::size_t s = basis.stride(mode);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    int n = basis.occupation(i, mode);
    if (n > 0) t.emplace_back(static_cast<int>(i - s), static_cast<int>(i), std::sqrt(double(n)));
  }
  SparseOp a(basis.dim(), basis.dim());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

inline SparseOp creation_op(const FockBasis& basis, int mode) {
  return SparseOp(annihilation_op(basis, mode).adjoint());
}

inline SparseOp number_op(const FockBasis& basis, int mode) {
  basis.check_mode(mode);
  std::vector<Eigen::Triplet<Complex>> t;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    int n = basis.occupation(i, mode);
    if (n > 0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), double(n));
  }
  SparseOp op(basis.dim(), basis.dim());
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

// (x_0, p_0, x_1, p_1, ...) with x = (a + a^dag)/sqrt2, p = (a - a^dag)/(sqrt2 i).
inline std::vector<SparseOp> quadrature_ops(const FockBasis& basis) {
  std::vector<SparseOp> r;
  const double s = 1.0 / std::sqrt(2.0);
  const Complex mi(0.0, -1.0);
  for (int m = 0; m < basis.num_modes(); ++m) {
    SparseOp a = annihilation_op(basis, m);
    SparseOp ad = SparseOp(a.adjoint());
    r.push_back(SparseOp((a + ad) * s));
    r.push_back(SparseOp((a - ad) * (s * mi)));
  }
  return r;
}

inline Complex expectation(const State& s, const SparseOp& op) {
  if (const auto* psi = std::get_if<FockState>(&s)) {
    const CVector& v = psi->amplitudes();
    return v.dot(op * v);
  }
  const CMatrix& rho = std::get<DensityMatrix>(s).matrix();
  CMatrix prod = op * rho;
  return prod.trace();
}

inline double mean_photon(const State& s) {
  const FockBasis& b = basis_of(s);
  RVector pop = populations(s);
  double n = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) n += pop(i) * b.total_occupation(i);
  return n;
}

inline double mode_mean_photon(const State& s, int mode) {
  const FockBasis& b = basis_of(s);
  b.check_mode(mode);
  RVector pop = populations(s);
  double n = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) n += pop(i) * b.occupation(i, mode);
  return n;
}

// <a_m> for every mode.
inline std::vector<Complex> mean_amplitudes(const State& s) {
  const FockBasis& b = basis_of(s);
  std::vector<Complex> out;
  for (int m = 0; m < b.num_modes(); ++m) out.push_back(expectation(s, annihilation_op(b, m)));
  return out;
}

// Population in the two highest Fock levels of each mode.
inline std::vector<double> top_level_population(const State& s, int levels = 2) {
  const FockBasis& b = basis_of(s);
  RVector pop = populations(s);
  std::vector<double> out(b.num_modes(), 0.0);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    for (int m = 0; m < b.num_modes(); ++m) {
      if (b.occupation(i, m) >= b.cutoff(m) - levels) out[m] += pop(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local operators

// Applies an operator acting on `modes` (row-major local index over the listed
// modes, first listed mode slowest) to every column of `cols`.
inline void apply_local(const FockBasis& basis, const std::vector<int>& modes, const CMatrix& op,
                        CMatrix& cols) {
  std::size_t local = 1;
  for (int m : modes) local *= static_cast<std::size_t>(basis.cutoff(m));
  if (static_cast<std::size_t>(op.rows()) != local || static_cast<std::size_t>(op.cols()) != local) {
    throw InvalidArgument("local operator size does not match the selected modes");
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) throw InvalidArgument("local operator modes must be distinct");
    }
  }
  std::vector<std::size_t> offset(local, 0);
  for (std::size_t l = 0; l < local; ++l) {
    std::size_t rem = l, off = 0;
    for (int k = static_cast<int>(modes.size()) - 1; k >= 0; --k) {
      std::size_t d = static_cast<std::size_t>(basis.cutoff(modes[k]));
      off += (rem % d) * basis.stride(modes[k]);
      rem /= d;
    }
    offset[l] = off;
  }
  CMatrix block(local, cols.cols());
  for (std::size_t base = 0; base < basis.dim(); ++base) {
    bool is_base = true;
    for (int m : modes) {
      if (basis.occupation(base, m) != 0) {
        is_base = false;
        break;
      }
    }
    if (!is_base) continue;
    for (std::size_t l = 0; l < local; ++l) block.row(l) = cols.row(base + offset[l]);
    block = (op * block).eval();
    for (std::size_t l = 0; l < local; ++l) cols.row(base + offset[l]) = block.row(l);
  }
}

// Applies a local operator to a state; the result is renormalized, with the
// lost norm or trace returned through `loss` when requested.
inline State apply_local_op(const State& s, const std::vector<int>& modes, const CMatrix& op,
                            double* loss = nullptr, double max_loss = 1e-6) {
  const FockBasis& b = basis_of(s);
  if (const auto* psi = std::get_if<FockState>(&s)) {
    CMatrix v = psi->amplitudes();
    apply_local(b, modes, op, v);
    double n2 = v.squaredNorm();
    if (loss) *loss = 1.0 - n2;
    if (std::abs(1.0 - n2) > max_loss) throw CutoffTooSmall("local operator leaked norm", 1.0 - n2);
    return FockState(b, v.col(0) / std::sqrt(n2), 1e-6);
  }
  CMatrix rho = std::get<DensityMatrix>(s).matrix();
  apply_local(b, modes, op, rho);
  CMatrix t = rho.adjoint();
  apply_local(b, modes, op, t);
  double tr = t.trace().real();
  if (loss) *loss = 1.0 - tr;
  if (std::abs(1.0 - tr) > max_loss) throw CutoffTooSmall("local operator leaked trace", 1.0 - tr);
  CMatrix out = t.adjoint() / tr;
  return DensityMatrix(b, 0.5 * (out + out.adjoint()));
}

// ---------------------------------------------------------------------------
// Composition

inline State tensor(const State& a, const State& b) {
  FockBasis basis = basis_of(a).concat(basis_of(b));
  if (is_pure_type(a) && is_pure_type(b)) {
    const CVector& va = std::get<FockState>(a).amplitudes();
    const CVector& vb = std::get<FockState>(b).amplitudes();
    CVector v(basis.dim());
    for (Eigen::Index i = 0; i < va.size(); ++i) v.segment(i * vb.size(), vb.size()) = va(i) * vb;
    return FockState(basis, std::move(v), 1e-8);
  }
  check_entries(basis.dim() * basis.dim(), "tensor product");
  CMatrix ra = to_density(a).matrix();
  CMatrix rb = to_density(b).matrix();
  CMatrix r(basis.dim(), basis.dim());
  for (Eigen::Index i = 0; i < ra.rows(); ++i) {
    for (Eigen::Index j = 0; j < ra.cols(); ++j) {
      r.block(i * rb.rows(), j * rb.cols(), rb.rows(), rb.cols()) = ra(i, j) * rb;
    }
  }
  return DensityMatrix(basis, std::move(r));
}

inline DensityMatrix partial_trace(const State& s, std::vector<int> keep) {
  const FockBasis& b = basis_of(s);
  if (keep.empty()) throw InvalidArgument("partial_trace needs at least one kept mode");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw InvalidArgument("partial_trace kept modes must be distinct");
  }
  for (int m : keep) b.check_mode(m);
  std::vector<int> traced;
  for (int m = 0; m < b.num_modes(); ++m) {
    if (!std::binary_search(keep.begin(), keep.end(), m)) traced.push_back(m);
  }
  FockBasis kb = b.subset(keep);
  if (traced.empty()) return to_density(s);
  FockBasis tb = b.subset(traced);
  check_entries(kb.dim() * kb.dim(), "partial trace output");

  std::vector<std::size_t> kidx(b.dim()), tidx(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    std::size_t k = 0, t = 0;
    for (std::size_t j = 0; j < keep.size(); ++j) k += b.occupation(i, keep[j]) * kb.stride(j);
    for (std::size_t j = 0; j < traced.size(); ++j) t += b.occupation(i, traced[j]) * tb.stride(j);
    kidx[i] = k;
    tidx[i] = t;
  }
  CMatrix out = CMatrix::Zero(kb.dim(), kb.dim());
  if (const auto* psi = std::get_if<FockState>(&s)) {
    CMatrix m = CMatrix::Zero(kb.dim(), tb.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) m(kidx[i], tidx[i]) = psi->amplitudes()(i);
    out = m * m.adjoint();
  } else {
    const CMatrix& rho = std::get<DensityMatrix>(s).matrix();
    std::vector<std::vector<std::size_t>> groups(tb.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) groups[tidx[i]].push_back(i);
    for (const auto& g : groups) {
      for (std::size_t i : g) {
        for (std::size_t j : g) out(kidx[i], kidx[j]) += rho(i, j);
      }
    }
  }
  return DensityMatrix(kb, 0.5 * (out + out.adjoint()));
}

// Embeds the state into a basis with larger (or equal) cutoffs.
inline State embed(const State& s, const FockBasis& target) {
  const FockBasis& b = basis_of(s);
  if (target.num_modes() != b.num_modes()) throw InvalidArgument("embed: mode count mismatch");
  std::vector<std::size_t> map(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    std::vector<int> occ = b.occupations(i);
    for (int m = 0; m < b.num_modes(); ++m) {
      if (occ[m] >= target.cutoff(m)) throw InvalidArgument("embed: target cutoff is smaller");
    }
    map[i] = target.index(occ);
  }
  if (const auto* psi = std::get_if<FockState>(&s)) {
    CVector v = CVector::Zero(target.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) v(map[i]) = psi->amplitudes()(i);
    return FockState(target, std::move(v), 1e-8);
  }
  check_entries(target.dim() * target.dim(), "embed");
  const CMatrix& rho = std::get<DensityMatrix>(s).matrix();
  CMatrix r = CMatrix::Zero(target.dim(), target.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) r(map[i], map[j]) = rho(i, j);
  }
  return DensityMatrix(target, std::move(r));
}

// Convex combination of states on a common basis.
inline DensityMatrix mix(const std::vector<double>& weights, const std::vector<State>& states) {
  if (weights.size() != states.size() || states.empty()) {
    throw InvalidArgument("mix needs one weight per state");
  }
  const FockBasis& b = basis_of(states[0]);
  CMatrix r = CMatrix::Zero(b.dim(), b.dim());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (basis_of(states[i]) != b) throw InvalidArgument("mix: bases differ");
    if (weights[i] < 0) throw InvalidArgument("mix: negative weight");
    r += weights[i] * to_density(states[i]).matrix();
  }
  return DensityMatrix::normalized(b, r);
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace ncvar
