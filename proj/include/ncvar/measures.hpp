#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fock.hpp"
#include "linopt.hpp"
#include "optimize.hpp"
#include "qfi.hpp"
#include "random.hpp"
#include "states.hpp"

namespace ncvar {

namespace detail {

inline const FockState& require_pure(const State& s, const char* op) {
  if (const auto* psi = std::get_if<FockState>(&s)) return *psi;
  const auto& rho = std::get<DensityMatrix>(s);
  if (std::abs(rho.purity() - 1.0) > 1e-8) {
    throw MixedStateInput(std::string(op) + " needs a pure state (purity " + std::to_string(rho.purity()) + ")");
  }
  throw MixedStateInput(std::string(op) + " needs a FockState; extract the pure vector first");
}

// Per-quadrature mean and variance of a pure vector (not necessarily unit norm
// as long as callers pass normalized vectors).
inline std::pair<double, double> quadrature_moments(const std::vector<SparseOp>& r, const CVector& v,
                                                    int k) {
  CVector rv = r[k] * v;
  double mean = v.dot(rv).real();
  return {mean, rv.squaredNorm() - mean * mean};
}

inline double mean_variance(const std::vector<SparseOp>& r, const CVector& v) {
  double total = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) total += quadrature_moments(r, v, static_cast<int>(k)).second;
  return total / (r.size() / 2);
}

}  // namespace detail

// V = (1/N) sum_k Var(R_k) for a pure state; 1 for coherent states.
inline double mean_quadrature_variance(const FockState& psi) {
  return detail::mean_variance(quadrature_ops(psi.basis()), psi.amplitudes());
}

inline double mean_quadrature_variance(const State& s) {
  return mean_quadrature_variance(detail::require_pure(s, "mean_quadrature_variance"));
}

struct QPure {
  double value;
  bool saturated;  // all first moments vanish, so value = 2 nbar / N
  double bound;    // 2 nbar / N
};

inline QPure q_pure(const FockState& psi) {
  std::vector<SparseOp> r = quadrature_ops(psi.basis());
  double total = 0.0, max_mean = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    auto [mean, var] = detail::quadrature_moments(r, psi.amplitudes(), static_cast<int>(k));
    total += var;
    max_mean = std::max(max_mean, std::abs(mean));
  }
  int n = psi.basis().num_modes();
  double q = std::max(total / n - 1.0, 0.0);
  return {q, max_mean <= 1e-6, 2.0 * mean_photon(psi) / n};
}

inline QPure q_pure(const State& s) { return q_pure(detail::require_pure(s, "q_pure")); }

inline double q_bound(const State& s) { return 2.0 * mean_photon(s) / basis_of(s).num_modes(); }

// ---------------------------------------------------------------------------
// Convex roof

// Pure-state ensemble: weights and normalized components.
using Ensemble = std::vector<std::pair<double, FockState>>;

inline double ensemble_q(const Ensemble& e) {
  if (e.empty()) throw InvalidArgument("empty ensemble");
  std::vector<SparseOp> r = quadrature_ops(e.front().second.basis());
  double q = 0.0, wsum = 0.0;
  for (const auto& [w, psi] : e) {
    q += w * (detail::mean_variance(r, psi.amplitudes()) - 1.0);
    wsum += w;
  }
  return q / wsum;
}

struct Decomposition {
  std::vector<double> weights;
  std::vector<FockState> components;
  CMatrix isometry;  // m x r, orthonormal columns

  Ensemble ensemble() const {
    Ensemble e;
    for (std::size_t i = 0; i < weights.size(); ++i) e.emplace_back(weights[i], components[i]);
    return e;
  }

  DensityMatrix reconstruct() const {
    const FockBasis& b = components.front().basis();
    CMatrix m = CMatrix::Zero(b.dim(), b.dim());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const CVector& v = components[i].amplitudes();
      m += weights[i] * v * v.adjoint();
    }
    return DensityMatrix(b, m, 1e-6);
  }
};

struct ConvexRoofOptions {
  int num_extra = 0;  // m - r, 0..3
  int restarts = 8;
  int max_iters = 3000;
  std::uint64_t seed = 1;
  std::size_t max_dimension = 4096;  // cap on rank * (rank + num_extra)
  std::vector<Ensemble> seeds;       // extra candidate decompositions of the same state
};

struct ConvexRoofResult {
  double value;  // upper bound on Q
  Decomposition decomposition;
  double eigen_value;  // Q of the eigendecomposition
  int rank;
  int num_extra;
  std::vector<double> restart_values;
};

namespace detail {

// Q of the decomposition v_j = sum_i W_ji sqrt(l_i)|i> for an m x r isometry W:
//   Q = (1/N)[sum_k Tr(rho R_k^2) - sum_j sum_k m_jk^2 / p_j] - 1
// with p_j = |v_j|^2 and m_jk = <v_j|R_k|v_j>.
class RoofObjective {
 public:
  explicit RoofObjective(const Spectrum& sp) : sp_(sp) {
    std::vector<SparseOp> r = quadrature_ops(sp.basis);
    n_ = sp.basis.num_modes();
    RVector sq = sp.weights.cwiseSqrt();
    tr_r2_ = 0.0;
    for (const auto& rk : r) {
      CMatrix b = rk * sp.vectors;
      for (int i = 0; i < sp.rank(); ++i) tr_r2_ += sp.weights(i) * b.col(i).squaredNorm();
      CMatrix bt = sp.vectors.adjoint() * b;
      bt = sq.asDiagonal() * bt * sq.asDiagonal();
      bt_.push_back(0.5 * (bt + bt.adjoint()));
    }
  }

  int rank() const { return sp_.rank(); }

  double operator()(const CMatrix& w) const {
    RVector p = w.cwiseAbs2() * sp_.weights;
    double s = 0.0;
    for (const auto& bt : bt_) {
      CMatrix wb = w.conjugate() * bt;
      for (Eigen::Index j = 0; j < w.rows(); ++j) {
        if (p(j) < 1e-300) continue;
        double mj = wb.row(j).cwiseProduct(w.row(j)).sum().real();
        s += mj * mj / p(j);
      }
    }
    return (tr_r2_ - s) / n_ - 1.0;
  }

  Decomposition decomposition(const CMatrix& w) const {
    Decomposition d;
    d.isometry = w;
    CMatrix scaled = sp_.vectors * sp_.weights.cwiseSqrt().asDiagonal();
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      CVector v = scaled * w.row(j).transpose();
      double p = v.squaredNorm();
      if (p < 1e-14) continue;
      d.weights.push_back(p);
      d.components.emplace_back(sp_.basis, v / std::sqrt(p), 1e-8);
    }
    double total = 0.0;
    for (double p : d.weights) total += p;
    for (double& p : d.weights) p /= total;
    return d;
  }

  // Isometry reproducing a given ensemble; nullopt if it leaves the support.
  std::optional<CMatrix> isometry_of(const Ensemble& e) const {
    CMatrix w(e.size(), sp_.rank());
    RVector isq = sp_.weights.cwiseSqrt().cwiseInverse();
    for (std::size_t j = 0; j < e.size(); ++j) {
      CVector v = std::sqrt(e[j].first) * e[j].second.amplitudes();
      CVector c = sp_.vectors.adjoint() * v;
      if ((sp_.vectors * c - v).norm() > 1e-6) return std::nullopt;
      w.row(j) = c.cwiseProduct(isq).transpose();
    }
    return w;
  }

 private:
  Spectrum sp_;
  int n_;
  double tr_r2_;
  std::vector<CMatrix> bt_;
};

// Hermitian m x m matrix from m^2 real parameters.
inline CMatrix hermitian_from(const std::vector<double>& x, int m) {
  CMatrix h(m, m);
  std::size_t k = 0;
  for (int i = 0; i < m; ++i) h(i, i) = x[k++];
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      h(i, j) = Complex(x[k], x[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  }
  return h;
}

inline CMatrix unitary_exp(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector ph = es.eigenvalues().unaryExpr([](double t) { return std::polar(1.0, t); }).cast<Complex>();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Unitary whose first r columns equal the (orthonormalized) isometry w.
inline CMatrix complete_isometry(const CMatrix& w_in, int m) {
  int r = static_cast<int>(w_in.cols());
  CMatrix w = CMatrix::Zero(m, r);
  w.topRows(w_in.rows()) = w_in;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w.adjoint() * w);
  CMatrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                     es.eigenvectors().adjoint();
  w = w * inv_sqrt;
  CMatrix full(m, m + r);
  full << w, CMatrix::Identity(m, m);
  Eigen::HouseholderQR<CMatrix> qr(full);
  CMatrix q = qr.householderQ();
  q.leftCols(r) = w;
  return q;
}

}  // namespace detail

// Upper bound on the convex roof of Q. Decompositions are generated by m x r
// isometries W = first r columns of U0 exp(iH); H is optimized by Nelder-Mead
// from the eigendecomposition (U0 = 1) and from Haar-random U0.
inline ConvexRoofResult q_convex_roof_upper(const State& s, const ConvexRoofOptions& opt = {}) {
  if (opt.num_extra < 0 || opt.num_extra > 3) throw InvalidArgument("num_extra must be in 0..3");
  Spectrum sp = spectrum_of(s);
  int r = sp.rank();
  int m = r + opt.num_extra;
  ConvexRoofResult res;
  res.rank = r;
  res.num_extra = opt.num_extra;
  if (r == 1) {
    FockState psi(sp.basis, sp.vectors.col(0), 1e-8);
    double q = q_pure(psi).value;
    res.value = res.eigen_value = q;
    res.decomposition = {{1.0}, {psi}, CMatrix::Ones(1, 1)};
    return res;
  }
  if (opt.max_iters > 0 && static_cast<std::size_t>(r) * m > opt.max_dimension) {
    throw DimensionCapExceeded("convex roof: rank " + std::to_string(r) + " x " + std::to_string(m) +
                               " exceeds the optimizer cap " + std::to_string(opt.max_dimension));
  }
  detail::RoofObjective obj(sp);

  CMatrix eigen_w = CMatrix::Identity(m, r);
  res.eigen_value = std::max(obj(eigen_w), 0.0);
  double best = res.eigen_value;
  CMatrix best_w = eigen_w;
  bool best_is_seed = false;
  Decomposition seed_decomp;

  std::vector<CMatrix> starts{CMatrix::Identity(m, m)};
  for (const auto& e : opt.seeds) {
    double q = ensemble_q(e);
    auto w = obj.isometry_of(e);
    if (q < best) {
      best = q;
      best_is_seed = true;
      seed_decomp = {};
      for (const auto& [p, psi] : e) {
        seed_decomp.weights.push_back(p);
        seed_decomp.components.push_back(psi);
      }
      seed_decomp.isometry = w ? *w : CMatrix();
    }
    if (w && static_cast<int>(w->rows()) <= m) starts.push_back(detail::complete_isometry(*w, m));
  }
  Rng rng(opt.seed, 0);
  for (int k = 0; k < opt.restarts; ++k) starts.push_back(random_unitary(m, rng));

  if (opt.max_iters > 0) {
    NelderMeadOptions nm;
    nm.max_iters = opt.max_iters;
    nm.initial_step = 0.4;
    for (const CMatrix& u0 : starts) {
      auto f = [&](const std::vector<double>& x) {
        CMatrix u = u0 * detail::unitary_exp(detail::hermitian_from(x, m));
        return obj(u.leftCols(r));
      };
      NelderMeadResult nr = nelder_mead_restarted(f, std::vector<double>(m * m, 0.0), nm);
      res.restart_values.push_back(nr.f);
      if (nr.f < best) {
        best = nr.f;
        best_is_seed = false;
        best_w = (u0 * detail::unitary_exp(detail::hermitian_from(nr.x, m))).leftCols(r);
      }
    }
  }
  res.value = std::max(best, 0.0);
  res.decomposition = best_is_seed ? seed_decomp : obj.decomposition(best_w);
  return res;
}

// ---------------------------------------------------------------------------
// Monotonicity audit

struct PhiLChannel {
  LinOpticalUnitary unitary;
  StateSpec ancilla;
  std::string label;
};

struct AuditRow {
  std::string label;
  double m_before, m_after;
  double q_before, q_after;
  bool m_violation, q_violation;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  int m_violations = 0;
  int q_violations = 0;
};

struct AuditOptions {
  double m_slack = 1e-5;
  double q_slack = 5e-3;
  bool with_q = true;
  ConvexRoofOptions roof{0, 4, 1500, 1, 4096, {}};
};

// Pushes a pure-state ensemble on A through Phi_L with a coherent-mixture
// ancilla. Each Fock outcome on E is one Kraus branch, so the result is an
// ensemble for the output state.
inline Ensemble propagate_ensemble(const Ensemble& e, const PhiLChannel& ch) {
  auto anc = coherent_ensemble(ch.ancilla);
  if (anc.empty()) throw InvalidArgument("ancilla is not a finite coherent mixture");
  FockBasis be(ch.ancilla.cutoffs);
  Ensemble out;
  for (const auto& [p, psi] : e) {
    const FockBasis& ba = psi.basis();
    for (const auto& [q, beta] : anc) {
      FockState a = FockState::normalized(be, detail::product_coherent(beta, ch.ancilla.cutoffs));
      State joint = tensor(psi, a);
      FockState o = std::get<FockState>(apply_linear_optics(joint, ch.unitary));
      Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(
          o.amplitudes().data(), ba.dim(), be.dim());
      for (std::size_t k = 0; k < be.dim(); ++k) {
        CVector v = mat.col(k);
        double w = v.squaredNorm();
        if (w < 1e-14) continue;
        out.emplace_back(p * q * w, FockState(ba, v / std::sqrt(w), 1e-8));
      }
    }
  }
  double total = 0.0;
  for (const auto& pe : out) total += pe.first;
  for (auto& pe : out) pe.first /= total;
  return out;
}

inline AuditReport monotonicity_audit(const State& rho, const std::vector<PhiLChannel>& corpus,
                                      std::uint64_t seed, const AuditOptions& opt = {}) {
  AuditReport rep;
  double m_before = metrological_power(rho).value;
  ConvexRoofOptions ro = opt.roof;
  ro.seed = seed;
  double q_before = 0.0;
  Ensemble before;
  if (opt.with_q) {
    ConvexRoofResult rb = q_convex_roof_upper(rho, ro);
    q_before = rb.value;
    before = rb.decomposition.ensemble();
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const PhiLChannel& ch = corpus[i];
    DensityMatrix after = apply_channel_phiL(rho, ch.ancilla, ch.unitary);
    AuditRow row{ch.label.empty() ? "channel " + std::to_string(i) : ch.label, m_before, 0.0, q_before, 0.0,
                 false, false};
    row.m_after = metrological_power(after).value;
    if (opt.with_q) {
      ConvexRoofOptions ra = ro;
      ra.seed = seed + 1 + i;
      if (!coherent_ensemble(ch.ancilla).empty()) ra.seeds.push_back(propagate_ensemble(before, ch));
      Spectrum sp = spectrum_of(after);
      // Very mixed outputs: keep the eigendecomposition and propagated seed only.
      if (static_cast<std::size_t>(sp.rank()) * (sp.rank() + ra.num_extra) > ra.max_dimension) ra.max_iters = 0;
      row.q_after = q_convex_roof_upper(after, ra).value;
    }
    row.m_violation = row.m_after > row.m_before + opt.m_slack;
    row.q_violation = opt.with_q && row.q_after > row.q_before + opt.q_slack;
    rep.m_violations += row.m_violation;
    rep.q_violations += row.q_violation;
    rep.rows.push_back(row);
  }
  return rep;
}

// Random Phi_L instances: Haar passive unitary on system + ancilla, small
// displacements, and an ancilla drawn from vacuum, coherent, and two- or
// three-component coherent mixtures.
inline std::vector<PhiLChannel> random_channel_corpus(int system_modes, int ancilla_modes, int ancilla_cutoff,
                                                      int count, std::uint64_t seed) {
  std::vector<PhiLChannel> out;
  int total = system_modes + ancilla_modes;
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, 1000 + i);
    PassiveUnitary u = PassiveUnitary::random(total, rng);
    std::vector<Complex> d(total);
    for (auto& x : d) x = std::polar(rng.uniform(0.0, 0.3), rng.uniform(0.0, 2 * kPi));
    auto amp = [&] {
      std::vector<Complex> a(ancilla_modes);
      for (auto& x : a) x = std::polar(rng.uniform(0.0, 0.5), rng.uniform(0.0, 2 * kPi));
      return a;
    };
    StateSpec anc;
    std::string kind;
    switch (i % 3) {
      case 0:
        anc = StateSpec::vacuum(ancilla_modes, ancilla_cutoff);
        kind = "vacuum";
        break;
      case 1:
        anc = StateSpec::coherent(amp(), ancilla_cutoff);
        kind = "coherent";
        break;
      default: {
        int k = 2 + static_cast<int>(rng.uniform() * 2.0);
        std::vector<double> w(k);
        std::vector<StateSpec> comps;
        double ws = 0.0;
        for (auto& x : w) ws += (x = rng.uniform(0.2, 1.0));
        for (auto& x : w) x /= ws;
        for (int c = 0; c < k; ++c) comps.push_back(StateSpec::coherent(amp(), ancilla_cutoff));
        anc = StateSpec::mixture(w, comps);
        kind = "coherent mixture";
      }
    }
    out.push_back({LinOpticalUnitary(u, d), anc, "random " + std::to_string(i) + " (" + kind + ")"});
  }
  return out;
}

}  // namespace ncvar
