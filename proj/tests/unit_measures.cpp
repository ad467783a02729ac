#include <gtest/gtest.h>

#include <cmath>

#include "ncvar/ncvar.hpp"

using namespace ncvar;

TEST(Measures, PureStateOracles) {
  State cat = build_state(StateSpec::cat(1.0, Parity::even, 40));
  EXPECT_NEAR(mean_quadrature_variance(cat), 2.5231883119115297, 1e-9);
  QPure sc = q_pure(build_state(StateSpec::squeezed_coherent(1.0, 0.0, 1.0, 120)));
  EXPECT_NEAR(sc.value, 2.7621956910836167, 1e-6);
  EXPECT_NEAR(sc.bound, 3.0328662575568419, 1e-6);
  EXPECT_FALSE(sc.saturated);
  QPure pac = q_pure(build_state(StateSpec::photon_added_coherent(1.0, 60)));
  EXPECT_NEAR(pac.value, 0.5, 1e-9);
  EXPECT_NEAR(pac.bound, 5.0, 1e-9);
}

TEST(Measures, SaturationOnCentredStates) {
  for (const auto& s : {StateSpec::fock(3, 24), StateSpec::squeezed_vacuum(0.6, 0.0, 80), StateSpec::noon(2, 5)}) {
    QPure q = q_pure(build_state(s));
    EXPECT_TRUE(q.saturated) << kind_name(s.kind);
    EXPECT_NEAR(q.value, q.bound, 1e-8) << kind_name(s.kind);
  }
}

TEST(Measures, PureInputRejectsMixedState) {
  EXPECT_THROW(q_pure(build_state(StateSpec::thermal(0.3, 40))), MixedStateInput);
}

TEST(Measures, ConvexRoofOnCoherentMixtureAndReconstruction) {
  std::vector<StateSpec> comps = {StateSpec::coherent(0.7, 30), StateSpec::coherent(Complex(-0.2, 0.5), 30)};
  State rho = build_state(StateSpec::mixture({0.4, 0.6}, comps));
  ConvexRoofResult r = q_convex_roof_upper(rho);
  EXPECT_LE(r.value, 1e-3);
  EXPECT_GE(r.eigen_value, r.value);
  EXPECT_LT(trace_distance(r.decomposition.reconstruct(), to_density(rho)), 1e-7);
  double sum = 0.0;
  for (double w : r.decomposition.weights) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(Measures, ConvexRoofSeedIsNeverWorse) {
  State x = build_state(StateSpec::fock(1, 10)), y = build_state(StateSpec::coherent(0.4, 10));
  DensityMatrix rho = mix({0.5, 0.5}, {x, y});
  ConvexRoofOptions o;
  o.max_iters = 0;
  o.seeds = {{{0.5, std::get<FockState>(x)}, {0.5, std::get<FockState>(y)}}};
  ConvexRoofResult r = q_convex_roof_upper(rho, o);
  EXPECT_LE(r.value, 0.5 * q_pure(x).value + 1e-9);
}

TEST(Measures, DimensionCap) {
  State rho = build_state(StateSpec::thermal(2.0, 60));
  ConvexRoofOptions o;
  o.max_dimension = 100;
  EXPECT_THROW(q_convex_roof_upper(rho, o), DimensionCapExceeded);
}

TEST(Measures, AuditOnFockInput) {
  auto corpus = random_channel_corpus(1, 1, 8, 6, 5);
  AuditOptions ao;
  ao.roof.restarts = 2;
  ao.roof.max_iters = 400;
  AuditReport r = monotonicity_audit(build_state(StateSpec::fock(1, 8)), corpus, 1, ao);
  EXPECT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.m_violations, 0);
  EXPECT_EQ(r.q_violations, 0);
}

TEST(Phase, WitnessOracles) {
  State cat = build_state(StateSpec::cat(1.0, Parity::even, 40));
  EXPECT_NEAR(number_qfi(cat, 0), 4.7262739902791644, 1e-9);
  EXPECT_NEAR(sql_witness(cat, 0), 0.41997434161402614, 1e-9);
  EXPECT_NEAR(sql_witness(build_state(StateSpec::coherent(1.7, 50)), 0), 0.0, 1e-8);
}

TEST(Phase, ParameterCountAndBudgetCeiling) {
  PhaseProblem p(build_state(StateSpec::fock(1, 6)));
  EXPECT_EQ(p.num_params(), 5);
  PhaseReport r = m_phase_alpha(p, 1.2);
  EXPECT_LE(std::abs(r.c), 1.2 + 1e-12);
  EXPECT_NEAR(r.unitary().budget(), 1.2, 1e-9);
  EXPECT_GE(r.value, -1e-9);
}

TEST(Phase, SeriesIsMonotone) {
  auto s = phase_series(build_state(StateSpec::fock(1, 10)), {0.0, 0.5, 1.0, 2.0});
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i].value, s[i - 1].value - 1e-6);
}

TEST(Phase, SufficientAlphaFormula) {
  EXPECT_NEAR(sufficient_alpha_formula(2.0, 1.0, 0.0, 3.0, 1), 1.9318516525781364, 1e-13);
  EXPECT_NEAR(sufficient_alpha_formula(2.0, 1.0, 0.25, 3.0, 1), 2.6566525146002684, 1e-13);
  EXPECT_NEAR(sufficient_alpha_formula(2.0, 1.0, 1.0, 3.0, 1), 3.4371989411231336, 1e-13);
  EXPECT_THROW(sufficient_alpha_formula(0.0, 1.0, 0.0, 1.0, 1), NoGuarantee);
  SufficientAlpha sa = sufficient_alpha(build_state(StateSpec::fock(1, 10)));
  EXPECT_NEAR(sa.i_phase0_upper, 1.0, 1e-12);
  EXPECT_NEAR(sa.alpha, 3.4371989411231336, 1e-9);
  EXPECT_NEAR(sa.i_phase0_optimizer, 0.25, 1e-6);
}

TEST(Phase, HeisenbergFockSlopeMatchesOracle) {
  std::vector<StateSpec> fam;
  for (int n = 1; n <= 8; ++n) fam.push_back(StateSpec::fock(n, n + 2));
  HeisenbergSweep s = heisenberg_sweep(fam, 4.0);
  EXPECT_NEAR(s.slope, 1.8401661421768574, 1e-8);
  EXPECT_THROW(heisenberg_sweep({fam[0], fam[1]}, 4.0), InvalidArgument);
}

TEST(Estimation, ValidatesInputs) {
  HomodyneExperiment e;
  e.state = gaussian_vacuum(1);
  e.mu = RVector::Unit(2, 0);
  e.shots = 10;
  EXPECT_THROW(simulate_and_estimate(e), InvalidArgument);
  e.shots = 1000;
  e.mu = RVector::Constant(2, 1.0);
  EXPECT_THROW(simulate_and_estimate(e), InvalidArgument);
  e.mu = RVector::Unit(2, 0);
  e.measured = RVector::Unit(2, 0);  // x is blind to a shift along p
  EXPECT_THROW(simulate_and_estimate(e), InvalidArgument);
}

TEST(Estimation, ReproducibleAndUnbiased) {
  HomodyneExperiment e;
  e.state = *gaussian_from_spec(StateSpec::squeezed_vacuum(0.8, 0.0, 10));
  e.mu = gaussian_qfi_matrix_direct(e.state.V).optimal_direction();
  e.theta = 0.3;
  e.shots = 5000;
  e.trials = 100;
  EstimationResult a = simulate_and_estimate(e), b = simulate_and_estimate(e);
  EXPECT_EQ(a.var_hat, b.var_hat);
  EXPECT_NEAR(a.mean_estimate, 0.3, 4.0 * std::sqrt(a.var_hat / e.trials));
  EXPECT_NEAR(a.qfi, 2.0 * std::exp(1.6), 1e-9);
  e.seed = 2;
  EXPECT_NE(simulate_and_estimate(e).var_hat, a.var_hat);
}

TEST(Reports, MeasureReportFields) {
  Outcome o = measure_report(StateSpec::decohered_cat(1.0, 0.5, 40));
  EXPECT_NEAR(o.report["M"].get<double>(), 1.1147072071934048, 1e-6);
  EXPECT_EQ(o.report["Q"]["label"], "upper bound");
  EXPECT_TRUE(o.converged);
  EXPECT_EQ(o.report["tool"]["version"], kVersion);
  EXPECT_TRUE(o.report.contains("spec_hash"));
  Outcome v = measure_report(StateSpec::vacuum(1, 6));
  EXPECT_EQ(v.report["M"].get<double>(), 0.0);
  EXPECT_NEAR(v.report["Q"]["value"].get<double>(), 0.0, 1e-12);
  Outcome n = measure_report(StateSpec::noon(2, 5));
  EXPECT_EQ(n.report["flags"].size(), 1u);
}

TEST(Reports, UnconvergedCutoffIsFlagged) {
  // |5> is exact at cutoff 6, but its quadrature moments need two more levels
  Outcome o = measure_report(StateSpec::fock(5, 6));
  EXPECT_FALSE(o.converged);
}

TEST(Reports, DecoheredAndThermalSweepClosedForms) {
  auto rows = sweep_2b({0.5, 1.0}, {0.25});
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.closed_form.has_value());
    EXPECT_LT(std::abs(r.value - *r.closed_form), 1e-6) << r.family << " " << r.parameter;
  }
  EXPECT_THROW(sweep_2b({}, {0.5}), InvalidArgument);
}

TEST(Verify, ModuleSuitesPass) {
  for (const auto& name : suite_names()) {
    auto checks = run_suite(name);
    EXPECT_FALSE(checks.empty()) << name;
    for (const auto& c : checks) {
      EXPECT_TRUE(c.passed) << c.suite << ": " << c.name << " observed " << c.observed << " expected " << c.expected
                            << " " << c.note;
    }
  }
}

TEST(Verify, InjectedPrefactorFaultIsCaught) {
  VerifyOptions o;
  o.inject_qfi_prefactor = true;
  auto checks = run_suite("qfi", o);
  int failed = 0;
  for (const auto& c : checks) failed += !c.passed;
  EXPECT_GT(failed, 5);
  EXPECT_THROW(run_suite("nope"), InvalidArgument);
}
