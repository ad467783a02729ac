#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fock.hpp"
#include "linopt.hpp"
#include "optimize.hpp"
#include "qfi.hpp"
#include "random.hpp"
#include "states.hpp"

namespace ncvar {

inline double number_qfi(const State& s, int mode) {
  const FockBasis& b = basis_of(s);
  return spectral_qfi(s, number_op(b, b.check_mode(mode)));
}

// W = I_F(rho, n)/4 - <n>; positive values certify nonclassicality.
inline double sql_witness(const State& s, int mode) {
  return number_qfi(s, mode) / 4.0 - mode_mean_photon(s, mode);
}

enum class PhaseObjective {
  metrological,  // I_F/4 - <n_1>
  number_qfi,    // I_F/4
};

struct PhaseOptions {
  int restarts = 4;
  int max_iters = 1500;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  bool grid_prescan = true;  // only used for single-mode inputs
  PhaseObjective objective = PhaseObjective::metrological;
  std::vector<std::vector<double>> warm_starts;
};

struct PhaseReport {
  double budget;
  double value;         // objective at the best point: a lower bound on the maximum
  double i_phase;       // I_F(sigma, n_1)
  double mean_n1;       // <n_1> in sigma
  double sql_witness;   // of the input on its first mode
  double c;             // displacement actually entering mode 1
  std::vector<double> params;  // mesh parameters on N+1 modes, then t with c = sin^2(t) |alpha|
  std::vector<double> restart_values;
  int evaluations = 0;

  // The achieving unitary; unused budget is parked on the ancilla mode.
  LinOpticalUnitary unitary() const {
    int n1 = static_cast<int>(std::lround(std::sqrt(double(params.size() - 1))));
    std::vector<double> mesh(params.begin(), params.end() - 1);
    std::vector<Complex> d(n1, 0.0);
    d[0] = c;
    d[n1 - 1] += std::sqrt(std::max(budget * budget - c * c, 0.0));
    return LinOpticalUnitary(PassiveUnitary::from_mesh(n1, mesh), d);
  }
};

// sigma = D(alpha) U0 (rho (x) |0><0|) U0^dag D^dag. In the Heisenberg picture
// U^dag n_1 U = (b + c)^dag (b + c) with b = sum_n u_n a_n (u the first row of
// the mixing matrix) and c the displacement on mode 1, so the QFI and <n_1> are
// evaluated on the fixed state rho (x) |0> with that generator. The system
// cutoff is raised by one and the ancilla kept at two levels, which makes the
// generator action exact.
class PhaseProblem {
 public:
  explicit PhaseProblem(const State& rho) {
    const FockBasis& b = basis_of(rho);
    n_ = b.num_modes();
    Spectrum sp = spectrum_of(rho);
    lam_ = sp.weights;
    std::vector<int> cut = b.cutoffs();
    for (int& c : cut) c += 1;
    cut.push_back(2);
    FockBasis ext(cut);
    check_entries(ext.dim() * static_cast<std::size_t>(sp.rank()) * (n_ + 1) * (n_ + 1), "phase problem");
    us_ = CMatrix::Zero(ext.dim(), sp.rank());
    for (std::size_t i = 0; i < b.dim(); ++i) {
      std::vector<int> occ = b.occupations(i);
      occ.push_back(0);
      us_.row(ext.index(occ)) = sp.vectors.row(i);
    }
    std::vector<SparseOp> a(n_ + 1);
    for (int m = 0; m <= n_; ++m) a[m] = annihilation_op(ext, m);
    int k = n_ + 1;
    y_.resize(k);
    z_.resize(k);
    w_.resize(k * k);
    for (int m = 0; m < k; ++m) {
      y_[m] = a[m] * us_;
      z_[m] = SparseOp(a[m].adjoint()) * us_;
    }
    for (int m = 0; m < k; ++m) {
      for (int n = 0; n < k; ++n) w_[m * k + n] = SparseOp(a[m].adjoint()) * y_[n];
    }
  }

  int system_modes() const { return n_; }
  int num_params() const { return (n_ + 1) * (n_ + 1) + 1; }

  struct Value {
    double qfi;
    double mean_n1;
  };

  // I_F and <n_1> for the generator (b + c)^dag (b + c), b = sum u_n a_n.
  Value evaluate(const CVector& u, Complex c) const {
    int k = n_ + 1;
    CMatrix bm = std::norm(c) * us_;
    for (int m = 0; m < k; ++m) {
      Complex um = std::conj(u(m));
      bm += um * c * z_[m] + std::conj(c) * u(m) * y_[m];
      for (int n = 0; n < k; ++n) {
        Complex coef = um * u(n);
        if (coef != Complex(0.0)) bm += coef * w_[m * k + n];
      }
    }
    CMatrix p = us_.adjoint() * bm;
    double mean = 0.0;
    for (Eigen::Index i = 0; i < lam_.size(); ++i) mean += lam_(i) * p(i, i).real();
    return {std::max(detail::qfi_entry(lam_, bm, p, bm, p), 0.0), mean};
  }

  // First row of the mesh unitary and c = sin^2(t) |alpha|.
  std::pair<CVector, double> decode(const std::vector<double>& x, double budget) const {
    int k = n_ + 1;
    std::vector<double> mesh(x.begin(), x.begin() + k * k);
    PassiveUnitary u = PassiveUnitary::from_mesh(k, mesh);
    double s = std::sin(x.back());
    return {u.matrix().row(0).transpose(), s * s * budget};
  }

  double objective(const std::vector<double>& x, double budget, PhaseObjective obj) const {
    auto [u, c] = decode(x, budget);
    Value v = evaluate(u, c);
    return obj == PhaseObjective::metrological ? v.qfi / 4.0 - v.mean_n1 : v.qfi / 4.0;
  }

  // Parameter vector for a given mixing matrix and displacement fraction s.
  static std::vector<double> params_for(const PassiveUnitary& u, double s) {
    std::vector<double> p = u.mesh_params();
    p.push_back(std::asin(std::sqrt(std::clamp(s, 0.0, 1.0))));
    return p;
  }

 private:
  int n_;
  RVector lam_;
  CMatrix us_;
  std::vector<CMatrix> y_, z_, w_;
};

// Lower bound on the alpha-invested metrological power (or, with the
// number_qfi objective, on the alpha-invested phase QFI) by multi-start
// Nelder-Mead over the Givens mesh of U(N+1) and the displacement fraction.
inline PhaseReport m_phase_alpha(const PhaseProblem& prob, double budget, const PhaseOptions& opt = {}) {
  if (!(budget >= 0.0)) throw InvalidArgument("displacement budget must be nonnegative");
  int k = prob.system_modes() + 1;
  PhaseReport rep{};
  rep.budget = budget;
  auto f = [&](const std::vector<double>& x) { return -prob.objective(x, budget, opt.objective); };

  std::vector<std::vector<double>> starts;
  starts.push_back(PhaseProblem::params_for(PassiveUnitary::identity(k), 0.0));
  CMatrix swap = CMatrix::Identity(k, k);
  swap(0, 0) = swap(k - 1, k - 1) = 0.0;
  swap(0, k - 1) = swap(k - 1, 0) = 1.0;
  starts.push_back(PhaseProblem::params_for(PassiveUnitary(swap), 0.0));
  starts.push_back(PhaseProblem::params_for(PassiveUnitary::identity(k), 1.0));
  for (const auto& w : opt.warm_starts) {
    if (static_cast<int>(w.size()) == prob.num_params()) starts.push_back(w);
  }

  if (opt.grid_prescan && k == 2) {
    std::vector<std::pair<double, std::vector<double>>> grid;
    for (int it = 0; it < 9; ++it) {
      for (int ip = 0; ip < 8; ++ip) {
        for (int ig = 0; ig < 8; ++ig) {
          for (int is = 0; is < 5; ++is) {
            std::vector<double> x{it * kPi / 16, ip * kPi / 4, ig * kPi / 4, 0.0,
                                  std::asin(std::sqrt(is / 4.0))};
            grid.push_back({f(x), x});
            ++rep.evaluations;
          }
        }
      }
    }
    std::partial_sort(grid.begin(), grid.begin() + 3, grid.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int i = 0; i < 3; ++i) starts.push_back(grid[i].second);
  }

  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng(opt.seed, r);
    PassiveUnitary u = PassiveUnitary::random(k, rng);
    starts.push_back(PhaseProblem::params_for(u, rng.uniform()));
  }

  NelderMeadOptions nm;
  nm.max_iters = opt.max_iters;
  nm.initial_step = 0.3;
  nm.ftol = opt.tol;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (const auto& x0 : starts) {
    double f0 = f(x0);
    ++rep.evaluations;
    if (f0 < best) {
      best = f0;
      best_x = x0;
    }
    NelderMeadResult nr = nelder_mead_restarted(f, x0, nm);
    rep.evaluations += nr.evaluations;
    rep.restart_values.push_back(-nr.f);
    if (nr.f < best) {
      best = nr.f;
      best_x = nr.x;
    }
  }
  auto [u, c] = prob.decode(best_x, budget);
  PhaseProblem::Value v = prob.evaluate(u, c);
  rep.value = -best;
  rep.i_phase = v.qfi;
  rep.mean_n1 = v.mean_n1;
  rep.c = c;
  rep.params = best_x;
  return rep;
}

inline PhaseReport m_phase_alpha(const State& rho, double budget, const PhaseOptions& opt = {}) {
  PhaseProblem prob(rho);
  PhaseReport rep = m_phase_alpha(prob, budget, opt);
  rep.sql_witness = sql_witness(rho, 0);
  return rep;
}

// Reports over ascending budgets. Each run is warm-started from the earlier
// optima with the same displacement c, so the series cannot decrease.
inline std::vector<PhaseReport> phase_series(const State& rho, const std::vector<double>& budgets,
                                             const PhaseOptions& opt = {}) {
  if (!std::is_sorted(budgets.begin(), budgets.end())) throw InvalidArgument("budgets must be ascending");
  PhaseProblem prob(rho);
  double w = sql_witness(rho, 0);
  std::vector<PhaseReport> out;
  for (double b : budgets) {
    PhaseOptions o = opt;
    for (const auto& prev : out) {
      std::vector<double> x = prev.params;
      double s = b > 0.0 ? prev.c / b : 0.0;
      x.back() = std::asin(std::sqrt(std::clamp(s, 0.0, 1.0)));
      o.warm_starts.push_back(x);
    }
    PhaseReport r = m_phase_alpha(prob, b, o);
    r.sql_witness = w;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Displacement-phase relations

struct DisplacementPhaseBounds {
  double lower;
  double upper;
  double i_phase0;  // budget-0 phase QFI (I_F/4) of rho (x) |0>
  double i_opt;     // optimal quadrature QFI of rho (x) |0>
};

// [sqrt(I0) -+ |alpha| sqrt(I_opt)]^2 with I_opt of rho (x) |0>, which is
// max(I_opt(rho), 1) since the vacuum ancilla contributes 1.
inline DisplacementPhaseBounds displacement_phase_bounds(double i_phase0, double i_opt_anc, double budget) {
  double a = std::sqrt(std::max(i_phase0, 0.0)), b = budget * std::sqrt(i_opt_anc);
  double lo = a - b;
  return {lo * lo, (a + b) * (a + b), i_phase0, i_opt_anc};
}

inline double i_opt_with_vacuum(const State& rho) { return std::max(i_opt(qfi_matrix(rho)), 1.0); }

inline DisplacementPhaseBounds displacement_phase_bounds(const State& rho, double budget, const PhaseOptions& opt = {}) {
  PhaseOptions o = opt;
  o.objective = PhaseObjective::number_qfi;
  double i0 = m_phase_alpha(rho, 0.0, o).value;
  return displacement_phase_bounds(i0, i_opt_with_vacuum(rho), budget);
}

// |alpha| > (K + sqrt(K^2 + M^2 nbar)) / M with
// K = sqrt(I0 I_opt) + sqrt(nbar + (N+1)/2).
inline double sufficient_alpha_formula(double m, double nbar, double i_phase0, double i_opt_anc, int modes) {
  if (!(m > 0.0)) throw NoGuarantee("metrological power is zero; no displacement budget is guaranteed to help");
  double k = std::sqrt(i_phase0 * i_opt_anc) + std::sqrt(nbar + (modes + 1) / 2.0);
  return (k + std::sqrt(k * k + m * m * nbar)) / m;
}

struct SufficientAlpha {
  double alpha;            // conservative value, from the upper bound on I0
  double alpha_optimizer;  // same formula with the optimizer's I0
  double m;
  double nbar;
  double i_opt;
  double i_phase0_optimizer;
  double i_phase0_upper;  // <(sum_n n_n)^2>, which dominates Var(n_1) after any passive mixing
};

inline SufficientAlpha sufficient_alpha(const State& rho, const PhaseOptions& opt = {}) {
  const FockBasis& b = basis_of(rho);
  double m = metrological_power(rho).value;
  if (m <= 1e-9) throw NoGuarantee("metrological power is zero; no displacement budget is guaranteed to help");
  SufficientAlpha r{};
  r.m = m;
  r.nbar = mean_photon(rho);
  r.i_opt = m + 1.0;
  PhaseOptions o = opt;
  o.objective = PhaseObjective::number_qfi;
  r.i_phase0_optimizer = m_phase_alpha(rho, 0.0, o).value;
  SparseOp ntot(b.dim(), b.dim());
  for (int k = 0; k < b.num_modes(); ++k) ntot += number_op(b, k);
  r.i_phase0_upper = expectation(rho, SparseOp(ntot * ntot)).real();
  r.alpha = sufficient_alpha_formula(m, r.nbar, r.i_phase0_upper, r.i_opt, b.num_modes());
  r.alpha_optimizer = sufficient_alpha_formula(m, r.nbar, r.i_phase0_optimizer, r.i_opt, b.num_modes());
  return r;
}

struct AsymptoticRatio {
  std::vector<double> budgets;
  std::vector<double> ratios;  // M_phase / |alpha|^2
  double m;
  double lower;  // M - 0.05 (M + 1)
  double upper;  // M + 1 + 0.05 (M + 1)
  bool in_band;
};

inline AsymptoticRatio asymptotic_ratio(const State& rho, const std::vector<double>& budgets,
                                        const PhaseOptions& opt = {}) {
  if (budgets.empty()) throw InvalidArgument("no budgets given");
  double nbar = mean_photon(rho);
  double need = 5.0 * std::sqrt(nbar + 1.0);
  if (budgets.back() < need) {
    throw InvalidArgument("largest budget must be at least " + std::to_string(need));
  }
  AsymptoticRatio a;
  a.budgets = budgets;
  a.m = metrological_power(rho).value;
  double tol = 0.05 * (a.m + 1.0);
  a.lower = a.m - tol;
  a.upper = a.m + 1.0 + tol;
  for (const auto& r : phase_series(rho, budgets, opt)) {
    a.ratios.push_back(r.budget > 0.0 ? r.value / (r.budget * r.budget) : 0.0);
  }
  a.in_band = a.ratios.back() >= a.lower && a.ratios.back() <= a.upper;
  return a;
}

// ---------------------------------------------------------------------------
// Heisenberg scaling

struct SweepPoint {
  double nbar;        // of the input
  double nbar_sigma;  // of the prepared probe
  double budget;
  double qfi;  // I_F(sigma, n_1)
};

struct HeisenbergSweep {
  std::vector<SweepPoint> points;
  double slope;  // least-squares slope of log I_F against log nbar_sigma
};

// Explicit probe: centre the state with displacements -<a_n>, rotate the
// optimal quadrature direction mu into mode 1 (u_n = mu_2n - i mu_2n+1), then
// displace mode 1 by sqrt(kappa nbar).
inline SweepPoint heisenberg_point(const State& rho, double kappa) {
  const FockBasis& b = basis_of(rho);
  int n = b.num_modes();
  double nbar = mean_photon(rho);
  std::vector<Complex> mean = mean_amplitudes(rho);
  RVector mu = metrological_power(rho).direction;
  CVector u = CVector::Zero(n + 1);
  for (int k = 0; k < n; ++k) u(k) = Complex(mu(2 * k), -mu(2 * k + 1));
  double alpha = std::sqrt(kappa * nbar);
  Complex c = alpha;
  for (int k = 0; k < n; ++k) c -= u(k) * mean[k];
  PhaseProblem prob(rho);
  double centred = nbar;
  for (const auto& m : mean) centred -= std::norm(m);
  return {nbar, centred + alpha * alpha, alpha, prob.evaluate(u, c).qfi};
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline HeisenbergSweep heisenberg_sweep(const std::vector<StateSpec>& family, double kappa) {
  if (family.size() < 4) throw InvalidArgument("a sweep needs at least 4 grid points");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  HeisenbergSweep s;
  std::vector<double> x, y;
  for (const auto& spec : family) {
    SweepPoint p = heisenberg_point(build_state(spec), kappa);
    s.points.push_back(p);
    x.push_back(p.nbar_sigma);
    y.push_back(p.qfi);
  }
  s.slope = loglog_slope(x, y);
  return s;
}

}  // namespace ncvar
