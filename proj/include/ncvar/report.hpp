#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "closed_form.hpp"
#include "estimation.hpp"
#include "gaussian.hpp"
#include "measures.hpp"
#include "phase.hpp"
#include "spec_json.hpp"
#include "truncation.hpp"

namespace ncvar {

struct RunSettings {
  int delta = 8;
  std::uint64_t seed = 1;
  int restarts = 8;
  int num_extra = 0;
};

// A report and whether its numerics passed the truncation check.
struct Outcome {
  json report;
  bool converged = true;
};

namespace detail {

inline json vec_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json mat_json(const RMatrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

inline json cmat_json(const CMatrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    a.push_back(row);
  }
  return a;
}

inline json header(const char* command, const StateSpec* spec, const RunSettings& rs) {
  json h;
  h["tool"] = {{"name", "ncvar"}, {"version", kVersion}};
  h["command"] = command;
  h["seed"] = rs.seed;
  h["restarts"] = rs.restarts;
  if (spec) {
    h["spec"] = spec_to_json(*spec);
    h["spec_hash"] = spec_hash(*spec);
    h["cutoff"] = spec->cutoffs;
    h["delta"] = rs.delta;
  }
  return h;
}

inline json leakage_json(const LeakageReport& l) {
  return {{"factory_leakage", l.factory_leakage},
          {"top_population", l.top_population},
          {"insufficient", l.insufficient}};
}

}  // namespace detail

// M, I_opt, I_mean, Q and the photon-number bound, with the same quantities
// recomputed at cutoff + delta.
inline Outcome measure_report(const StateSpec& spec, const RunSettings& rs = {}) {
  Outcome out;
  json& r = out.report = detail::header("measure", &spec, rs);
  BuiltState b = build_state_with_leakage(spec);
  if (b.leakage > 1e-8) throw CutoffTooSmall(std::string(kind_name(spec.kind)) + ": cutoff too small", b.leakage);
  State big = build_state(spec.enlarged(rs.delta));
  const State& s = b.state;

  QfiMatrix f = qfi_matrix(s), f2 = qfi_matrix(big);
  MetrologicalPower m = metrological_power(f), m2 = metrological_power(f2);
  double nbar = mean_photon(s), nbar2 = mean_photon(big);
  r["nbar"] = nbar;
  r["q_bound"] = q_bound(s);
  r["M"] = m.value;
  r["lambda_max"] = m.lambda_max;
  r["min_variance"] = m.min_variance();
  r["i_opt"] = i_opt(f);
  r["i_mean"] = i_mean(f);
  r["optimal_direction"] = detail::vec_json(m.direction);
  r["qfi_matrix"] = detail::mat_json(f.matrix());

  json q;
  double dq = 0.0;
  if (is_pure_type(s)) {
    QPure qp = q_pure(s), qp2 = q_pure(big);
    q = {{"label", "pure"}, {"value", qp.value}, {"saturated", qp.saturated}};
    dq = std::abs(qp.value - qp2.value);
  } else {
    ConvexRoofOptions co;
    co.num_extra = rs.num_extra;
    co.restarts = rs.restarts;
    co.seed = rs.seed;
    co.max_dimension = 400;
    ConvexRoofResult cr;
    std::string label = "upper bound";
    try {
      cr = q_convex_roof_upper(s, co);
    } catch (const DimensionCapExceeded&) {
      co.max_iters = 0;
      cr = q_convex_roof_upper(s, co);
      label = "upper bound (eigendecomposition only; optimizer dimension cap exceeded)";
    }
    q = {{"label", label},
         {"value", cr.value},
         {"eigendecomposition_value", cr.eigen_value},
         {"rank", cr.rank},
         {"num_extra", cr.num_extra},
         {"components", cr.decomposition.weights.size()}};
  }
  r["Q"] = q;

  LeakageReport lr = leakage_report(spec, rs.delta, false);
  json t = detail::leakage_json(lr);
  t["M_at_cutoff_plus_delta"] = m2.value;
  t["delta_M"] = std::abs(m.value - m2.value);
  t["delta_i_mean"] = std::abs(i_mean(f) - i_mean(f2));
  t["delta_nbar"] = std::abs(nbar - nbar2);
  if (is_pure_type(s)) t["delta_Q"] = dq;
  out.converged = std::abs(m.value - m2.value) <= kConvergenceTol;
  t["converged"] = out.converged;
  r["truncation"] = t;

  json flags = json::array();
  if (spec.kind == StateKind::noon && spec.n[0] >= 2) {
    flags.push_back({{"flag", "noon_m_differs_from_2nbar"},
                     {"M", m.value},
                     {"two_nbar", 2.0 * nbar},
                     {"note", "for NOON states with n >= 2 the QFI matrix is (2n+2) I, so M = n, not 2 nbar"}});
  }
  r["flags"] = flags;
  return out;
}

inline Outcome gaussian_report(const StateSpec& spec, const RunSettings& rs = {}) {
  auto g = gaussian_from_spec(spec);
  if (!g) throw SpecError(std::string("gaussian: kind '") + kind_name(spec.kind) + "' is not Gaussian");
  Outcome out;
  json& r = out.report = detail::header("gaussian", &spec, rs);
  WilliamsonData w = williamson(g->V);
  QfiMatrix fp = gaussian_qfi_matrix(w), fd = gaussian_qfi_matrix_direct(g->V);
  double mp = std::max(fp.lambda_max() / 2.0 - 1.0, 0.0), md = std::max(fd.lambda_max() / 2.0 - 1.0, 0.0);
  r["mean"] = detail::vec_json(g->d);
  r["covariance"] = detail::mat_json(g->V);
  r["symplectic_eigenvalues"] = detail::vec_json(w.nus);
  r["williamson_S"] = detail::mat_json(w.S);
  r["M"] = md;
  r["M_williamson_form"] = mp;
  r["qfi_matrix"] = detail::mat_json(fd.matrix());
  r["qfi_matrix_williamson_form"] = detail::mat_json(fp.matrix());
  r["forms_agree"] = std::abs(mp - md) <= 1e-8 && (fp.matrix() - fd.matrix()).cwiseAbs().maxCoeff() <= 1e-8;
  if (spec.modes == 1) r["G"] = single_mode_squeezing_G(g->V);
  Classicality c = gaussian_classicality(g->V);
  r["classicality"] = {{"classical", c.classical},
                       {"margin", c.margin},
                       {"criterion", c.multimode_extension ? "lambda_min(V) >= 1 (multimode extension)"
                                                           : "lambda_min(V) >= 1 (single mode)"}};
  if (spec.modes == 1 && (spec.kind == StateKind::squeezed_thermal || spec.kind == StateKind::thermal ||
                          spec.kind == StateKind::squeezed_vacuum)) {
    double nth = spec.nbar.empty() ? 0.0 : spec.nbar[0];
    r["critical_squeezing"] = critical_squeezing(nth);
  }
  json fock;
  try {
    LeakageReport lr = leakage_report(spec, rs.delta, true);
    fock = detail::leakage_json(lr);
    fock["M_fock"] = lr.m_at_cutoff;
    fock["M_fock_at_cutoff_plus_delta"] = lr.m_at_cutoff_plus_delta;
    fock["delta_M"] = lr.delta_m();
    fock["abs_diff_to_gaussian"] = std::abs(lr.m_at_cutoff - md);
    // the covariance result is exact; only the diagnostic depends on the cutoff
    fock["converged"] = lr.converged();
  } catch (const Error& e) {
    fock = {{"error", e.what()}};
  }
  r["fock_cross_check"] = fock;
  return out;
}

struct PhaseSettings {
  std::optional<double> budget;  // nullopt: use the sufficient budget
  int max_iters = 1500;
};

inline json phase_json(const PhaseReport& p) {
  LinOpticalUnitary u = p.unitary();
  json d = json::array();
  for (auto z : u.displacement) d.push_back(json::array({z.real(), z.imag()}));
  return {{"budget", p.budget},
          {"m_phase_alpha", p.value},
          {"i_phase", p.i_phase},
          {"mean_n1", p.mean_n1},
          {"displacement_on_mode_1", p.c},
          {"unitary", {{"mixing_matrix", detail::cmat_json(u.passive.matrix())}, {"displacement", d}}},
          {"restart_values", p.restart_values},
          {"evaluations", p.evaluations}};
}

inline Outcome phase_report(const StateSpec& spec, const RunSettings& rs, const PhaseSettings& ps) {
  Outcome out;
  json& r = out.report = detail::header("phase", &spec, rs);
  State s = build_state(spec);
  PhaseOptions po;
  po.restarts = rs.restarts;
  po.seed = rs.seed;
  po.max_iters = ps.max_iters;
  double budget;
  if (ps.budget) {
    budget = *ps.budget;
    r["budget_source"] = "given";
  } else {
    SufficientAlpha sa = sufficient_alpha(s, po);
    budget = sa.alpha;
    r["budget_source"] = "sufficient";
    r["sufficient_alpha"] = {{"alpha", sa.alpha},
                             {"alpha_with_optimizer_i_phase0", sa.alpha_optimizer},
                             {"M", sa.m},
                             {"nbar", sa.nbar},
                             {"i_opt_with_vacuum", sa.i_opt},
                             {"i_phase0_optimizer", sa.i_phase0_optimizer},
                             {"i_phase0_upper", sa.i_phase0_upper}};
  }
  if (!(budget >= 0.0)) throw InvalidArgument("budget must be nonnegative");
  PhaseReport p = m_phase_alpha(s, budget, po);
  r["sql_witness"] = p.sql_witness;
  r["number_qfi"] = number_qfi(s, 0);
  r["result"] = phase_json(p);

  PhaseOptions pq = po;
  pq.objective = PhaseObjective::number_qfi;
  PhaseProblem prob(s);
  double i0 = m_phase_alpha(prob, 0.0, pq).value;
  pq.warm_starts = {p.params};
  double ia = m_phase_alpha(prob, budget, pq).value;
  DisplacementPhaseBounds pb = displacement_phase_bounds(i0, i_opt_with_vacuum(s), budget);
  double tol = 1e-4 * std::max(pb.upper, 1.0);
  r["displacement_phase_bounds"] = {{"i_phase0", i0},
                                    {"i_phase_alpha", ia},
                                    {"lower", pb.lower},
                                    {"upper", pb.upper},
                                    {"within", ia >= pb.lower - tol && ia <= pb.upper + tol}};

  // Same optimization one delta higher, warm-started from the optimum.
  State big = build_state(spec.enlarged(rs.delta));
  PhaseOptions pb2 = po;
  pb2.warm_starts = {p.params};
  PhaseReport p2 = m_phase_alpha(big, budget, pb2);
  json t = detail::leakage_json(leakage_report(spec, rs.delta, false));
  t["m_phase_alpha_at_cutoff_plus_delta"] = p2.value;
  t["delta_m_phase_alpha"] = std::abs(p2.value - p.value);
  out.converged = std::abs(p2.value - p.value) <= 1e-5 * std::max(1.0, std::abs(p.value));
  t["converged"] = out.converged;
  r["truncation"] = t;
  return out;
}

struct CrbSettings {
  std::optional<StateSpec> spec;  // Gaussian; default squeezed vacuum r = 0.8
  double theta = 0.3;
  long shots = 100000;
  int trials = 200;
};

inline Outcome crb_report(const RunSettings& rs, const CrbSettings& cs) {
  StateSpec spec = cs.spec ? *cs.spec : StateSpec::squeezed_vacuum(0.8, 0.0, 1);
  auto g = gaussian_from_spec(spec);
  if (!g) throw SpecError(std::string("crb: kind '") + kind_name(spec.kind) + "' is not Gaussian");
  Outcome out;
  json& r = out.report = detail::header("crb", &spec, rs);
  r.erase("cutoff");
  r.erase("delta");
  r["truncation"] = "none (covariance-matrix computation)";
  HomodyneExperiment e;
  e.state = *g;
  e.mu = gaussian_qfi_matrix_direct(g->V).optimal_direction();
  e.theta = cs.theta;
  e.shots = cs.shots;
  e.trials = cs.trials;
  e.seed = rs.seed;
  EstimationResult res = simulate_and_estimate(e);
  r["direction"] = detail::vec_json(e.mu);
  r["theta"] = cs.theta;
  r["shots"] = cs.shots;
  r["trials"] = cs.trials;
  r["var_hat"] = res.var_hat;
  r["mean_estimate"] = res.mean_estimate;
  r["qfi"] = res.qfi;
  r["homodyne_fisher_information"] = res.homodyne_fi;
  r["crb_variance"] = 1.0 / (cs.shots * res.qfi);
  r["ratio"] = res.ratio;
  return out;
}

inline Outcome state_report(const StateSpec& spec, const RunSettings& rs) {
  Outcome out;
  json& r = out.report = detail::header("state", &spec, rs);
  LeakageReport lr = leakage_report(spec, rs.delta, true);
  State s = build_state_with_leakage(spec).state;
  r["dimension"] = basis_of(s).dim();
  r["pure"] = is_pure_type(s);
  r["purity"] = purity(s);
  r["nbar"] = mean_photon(s);
  json modes = json::array();
  std::vector<Complex> a = mean_amplitudes(s);
  for (int m = 0; m < spec.modes; ++m) {
    modes.push_back({{"nbar", mode_mean_photon(s, m)}, {"mean_a", json::array({a[m].real(), a[m].imag()})}});
  }
  r["modes_detail"] = modes;
  json t = detail::leakage_json(lr);
  t["M_at_cutoff"] = lr.m_at_cutoff;
  t["M_at_cutoff_plus_delta"] = lr.m_at_cutoff_plus_delta;
  t["delta_M"] = lr.delta_m();
  out.converged = lr.converged();
  t["converged"] = out.converged;
  r["truncation"] = t;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  std::string family;
  double parameter;
  std::string measure;  // "Q" or "M"
  double nbar;
  double value;
  double bound;
  bool converged;
  std::optional<double> closed_form;
  bool saturated = false;
};

inline std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << "family,parameter,measure,nbar,value,bound,saturated,converged,closed_form,abs_delta\r\n";
  for (const auto& r : rows) {
    o << csv_field(r.family) << ',' << csv_number(r.parameter) << ',' << r.measure << ',' << csv_number(r.nbar)
      << ',' << csv_number(r.value) << ',' << csv_number(r.bound) << ',' << (r.saturated ? "true" : "false")
      << ',' << (r.converged ? "true" : "false") << ',';
    if (r.closed_form) o << csv_number(*r.closed_form) << ',' << csv_number(std::abs(r.value - *r.closed_form));
    else o << ',';
    o << "\r\n";
  }
  return o.str();
}

namespace detail {

// Pure-state Q row at the leakage-policy cutoff.
inline SweepRow q_row(const std::string& family, double param, StateSpec spec, int delta) {
  spec = spec.with_cutoff(minimal_cutoff(spec, 1e-12));
  QPure q = q_pure(build_state(spec));
  QPure q2 = q_pure(build_state(spec.enlarged(delta)));
  SweepRow r{family, param, "Q", q.bound * spec.modes / 2.0, q.value, q.bound,
             std::abs(q.value - q2.value) <= kConvergenceTol, std::nullopt, false};
  r.saturated = std::abs(q.value - q.bound) <= 1e-8;
  return r;
}

inline SweepRow m_row(const std::string& family, double param, StateSpec spec, int delta, double closed) {
  spec = spec.with_cutoff(minimal_cutoff(spec, 1e-12));
  LeakageReport lr = leakage_report(spec, delta, true);
  State s = build_state(spec);
  return {family, param, "M", mean_photon(s), lr.m_at_cutoff, 2.0 * mean_photon(s) / spec.modes, lr.converged(),
          closed, false};
}

}  // namespace detail

inline std::vector<double> default_grid_2a() { return {0.5, 1.0, 1.5, 2.0}; }
inline std::vector<double> default_grid_2a_r() { return {0.2, 0.4, 0.6, 0.8, 1.0}; }
inline std::vector<double> default_grid_2b_alpha() { return {0.5, 1.0, 1.5, 2.0}; }
inline std::vector<double> default_grid_2b_r() { return {0.25, 0.5, 0.75}; }

// Q against the photon-number bound. Integer families (Fock, NOON,
// Fock-plus-coherent) use n = 1..4, squeezed vacuum runs over r_grid and the
// remaining families over the alpha grid.
inline std::vector<SweepRow> sweep_2a(const std::vector<double>& grid, const std::vector<double>& r_grid,
                                      int delta = 8) {
  if (grid.empty() || r_grid.empty()) throw InvalidArgument("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (int n = 1; n <= 4; ++n) rows.push_back(detail::q_row("fock", n, StateSpec::fock(n, 1), delta));
  for (int n = 1; n <= 4; ++n) rows.push_back(detail::q_row("noon", n, StateSpec::noon(n, 1), delta));
  for (double a : grid) rows.push_back(detail::q_row("cat_even", a, StateSpec::cat(a, Parity::even, 1), delta));
  for (double r : r_grid) rows.push_back(detail::q_row("squeezed_vacuum", r, StateSpec::squeezed_vacuum(r, 0, 1), delta));
  for (int n = 1; n <= 4; ++n) {
    rows.push_back(detail::q_row("fock_plus_coherent", n, StateSpec::fock_plus_coherent(n, std::sqrt(double(n)), 1),
                                 delta));
  }
  for (double a : grid) {
    rows.push_back(detail::q_row("squeezed_coherent_xi1", a, StateSpec::squeezed_coherent(1.0, 0.0, a, 1), delta));
  }
  for (double a : grid) {
    rows.push_back(detail::q_row("photon_added_coherent", a, StateSpec::photon_added_coherent(a, 1), delta));
  }
  return rows;
}

// M for decohered cats (Gamma = 0.01, 0.3, 0.7 over an alpha grid) and
// squeezed thermal states (nbar_th = 0.01, 0.1, 0.5, 1.0 over an r grid), each
// with its closed form.
inline std::vector<SweepRow> sweep_2b(const std::vector<double>& alpha_grid, const std::vector<double>& r_grid,
                                      int delta = 8) {
  if (alpha_grid.empty() || r_grid.empty()) throw InvalidArgument("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (double g : {0.01, 0.3, 0.7}) {
    for (double a : alpha_grid) {
      rows.push_back(detail::m_row("decohered_cat_gamma_" + csv_number(g), a, StateSpec::decohered_cat(a, g, 1),
                                   delta, closed_form::decohered_cat_m(a, g)));
    }
  }
  for (double nth : {0.01, 0.1, 0.5, 1.0}) {
    for (double r : r_grid) {
      rows.push_back(detail::m_row("squeezed_thermal_nbar_" + csv_number(nth), r,
                                   StateSpec::squeezed_thermal(r, 0.0, nth, 1), delta,
                                   closed_form::squeezed_thermal_m(r, nth)));
    }
  }
  return rows;
}

// Sweeps one numeric field of a base spec ("alpha", "r", "gamma", "nbar", "n",
// "theta") and reports M and Q (pure: Q itself, mixed: eigendecomposition upper bound).
inline std::vector<SweepRow> sweep_custom(const StateSpec& base, const std::string& param,
                                          const std::vector<double>& grid, int delta = 8) {
  if (grid.empty()) throw InvalidArgument("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (double x : grid) {
    StateSpec s = base;
    if (param == "alpha") {
      if (s.alpha.empty()) throw SpecError("custom sweep: spec has no alpha");
      for (auto& a : s.alpha) a = a == Complex(0.0) ? Complex(x) : x * a / std::abs(a);
    } else if (param == "r") {
      s.r = x;
    } else if (param == "theta") {
      s.theta = x;
    } else if (param == "gamma") {
      s.gamma = x;
    } else if (param == "nbar") {
      for (auto& v : s.nbar) v = x;
    } else if (param == "n") {
      for (auto& v : s.n) v = static_cast<int>(std::lround(x));
    } else {
      throw SpecError("custom sweep: unknown parameter '" + param + "'");
    }
    s.validate();
    LeakageReport lr = leakage_report(s, delta, true);
    State st = build_state(s);
    double nbar = mean_photon(st);
    SweepRow m{kind_name(s.kind), x, "M", nbar, lr.m_at_cutoff, 2.0 * nbar / s.modes, lr.converged(), std::nullopt,
               false};
    rows.push_back(m);
    double q = is_pure_type(st) ? q_pure(st).value : q_convex_roof_upper(st, {0, 0, 0, 1, 4096, {}}).value;
    SweepRow qr{kind_name(s.kind), x, "Q", nbar, q, 2.0 * nbar / s.modes, lr.converged(), std::nullopt, false};
    qr.saturated = is_pure_type(st) && std::abs(q - qr.bound) <= 1e-8;
    rows.push_back(qr);
  }
  return rows;
}

}  // namespace ncvar
