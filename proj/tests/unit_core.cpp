#include <gtest/gtest.h>

#include <cmath>

#include "ncvar/ncvar.hpp"

using namespace ncvar;

// Reference values below come from tests/oracles/oracles.py (numpy/scipy,
// independent dense implementation).

namespace {

double m_of(const StateSpec& s) { return metrological_power(build_state(s)).value; }

}  // namespace

TEST(FockBasis, OrderingAndDimension) {
  FockBasis b(std::vector<int>{3, 4, 5});
  EXPECT_EQ(b.dim(), 60u);
  EXPECT_EQ(b.index({1, 0, 0}), 20u);
  EXPECT_EQ(b.index({0, 0, 1}), 1u);
  for (std::size_t i = 0; i < b.dim(); ++i) EXPECT_EQ(b.index(b.occupations(i)), i);
}

TEST(States, FactoriesArePhysical) {
  for (const auto& s : {StateSpec::cat(1.0, Parity::odd, 40), StateSpec::squeezed_thermal(0.5, 0.2, 0.3, 60),
                        StateSpec::decohered_cat(1.2, -0.4, 40), StateSpec::noon(2, 4),
                        StateSpec::entangled_coherent({0.6, -0.2}, Parity::odd, 16)}) {
    DensityMatrix rho = to_density(build_state(s));
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-8) << kind_name(s.kind);
    EXPECT_GE(rho.min_eigenvalue(), -1e-10) << kind_name(s.kind);
  }
}

TEST(States, CatPhotonNumber) {
  EXPECT_NEAR(mean_photon(build_state(StateSpec::cat(1.0, Parity::even, 40))), 0.76159415595576485, 1e-10);
}

TEST(States, CutoffTooSmallIsReported) {
  EXPECT_THROW(build_state(StateSpec::coherent(3.0, 5)), CutoffTooSmall);
  EXPECT_THROW(StateSpec::decohered_cat(1.0, 1.5, 20).validate(), InvalidArgument);
  EXPECT_THROW(StateSpec::mixture({0.5, 0.6}, {StateSpec::vacuum(1, 4), StateSpec::fock(1, 4)}).validate(),
               InvalidArgument);
}

TEST(Linopt, MeshRoundTripAndSymplecticEmbedding) {
  Rng rng(3, 0);
  for (int n = 1; n <= 4; ++n) {
    PassiveUnitary u = PassiveUnitary::random(n, rng);
    PassiveUnitary v = PassiveUnitary::from_mesh(n, u.mesh_params());
    EXPECT_LT((u.matrix() - v.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(is_symplectic(quadrature_symplectic(u), 1e-10));
  }
}

TEST(Linopt, BalancedBeamSplitterOnOnePhoton) {
  State in = tensor(build_state(StateSpec::fock(1, 3)), build_state(StateSpec::vacuum(1, 3)));
  State out = apply_beam_splitter(in, 0, 1, kPi / 4, 0.0);
  const FockBasis& b = basis_of(out);
  const CVector& v = std::get<FockState>(out).amplitudes();
  EXPECT_NEAR(std::norm(v(b.index({1, 0}))), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(v(b.index({0, 1}))), 0.5, 1e-12);
}

TEST(Linopt, ConcentratingUnitaryMapsEcsToCat) {
  std::vector<Complex> a = {0.6, Complex(0.0, -0.5)};
  State ecs = build_state(StateSpec::entangled_coherent(a, Parity::odd, 18));
  State moved = apply_passive(ecs, concentrating_unitary(a));
  State cat = tensor(build_state(StateSpec::cat(std::sqrt(0.61), Parity::odd, 18)), build_state(StateSpec::vacuum(1, 18)));
  Complex ov = (std::get<FockState>(cat).amplitudes().adjoint() * std::get<FockState>(moved).amplitudes())(0);
  EXPECT_NEAR(std::abs(ov), 1.0, 1e-9);
}

TEST(Linopt, ChannelRejectsNonclassicalAncilla) {
  State one = build_state(StateSpec::fock(1, 4));
  EXPECT_THROW(apply_channel_phiL(one, StateSpec::fock(1, 4), LinOpticalUnitary(PassiveUnitary::identity(2))),
               NonClassicalAncilla);
}

TEST(Qfi, SpectralExamples) {
  State coh = build_state(StateSpec::coherent(Complex(0.4, 0.9), 40));
  EXPECT_NEAR(spectral_qfi(coh, quadrature_ops(basis_of(coh))[1]), 2.0, 1e-8);
  State th = build_state(StateSpec::thermal(1.0, 80));
  EXPECT_NEAR(spectral_qfi(th, quadrature_ops(basis_of(th))[0]), 0.66666666676004138, 1e-7);
  State f = build_state(StateSpec::fock(4, 8));
  EXPECT_EQ(spectral_qfi(f, number_op(basis_of(f), 0)), 0.0);
  EXPECT_THROW(spectral_qfi(f, annihilation_op(basis_of(f), 0)), NotHermitian);
}

TEST(Qfi, MatrixExamples) {
  QfiMatrix f = qfi_matrix(build_state(StateSpec::fock({1, 0}, 6)));
  RVector d(4);
  d << 6, 6, 2, 2;
  EXPECT_LT((f.matrix() - RMatrix(d.asDiagonal())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(i_mean(f), 2.0, 1e-12);
  EXPECT_NEAR(i_opt(f), 3.0, 1e-12);
  // degenerate top eigenspace: lowest-index direction
  RVector mu = f.optimal_direction();
  EXPECT_NEAR(std::abs(mu(0)), 1.0, 1e-12);
}

TEST(Qfi, MetrologicalPowerClosedForms) {
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(m_of(StateSpec::fock(n, n + 20)), 2.0 * n, 1e-6);
  EXPECT_NEAR(m_of(StateSpec::cat(1.0, Parity::even, 40)), 3.5231883119115297, 1e-6);
  EXPECT_NEAR(m_of(StateSpec::decohered_cat(1.0, 0.5, 40)), 1.1147072071934048, 1e-6);
  EXPECT_NEAR(m_of(StateSpec::squeezed_vacuum(0.1, 0.0, 30)), 0.22140275816016985, 1e-8);
  EXPECT_NEAR(m_of(StateSpec::coherent(1.5, 40)), 0.0, 1e-8);
  EXPECT_NEAR(m_of(StateSpec::thermal(0.7, 80)), 0.0, 1e-8);
}

TEST(Qfi, NoonValueIsN) {
  // For n >= 2 the QFI matrix is (2n+2) I.
  for (int n = 2; n <= 4; ++n) EXPECT_NEAR(m_of(StateSpec::noon(n, n + 3)), double(n), 1e-8);
}

TEST(Qfi, CertificateAttainsBound) {
  State sq = build_state(StateSpec::squeezed_vacuum(0.7, 0.0, 80));
  MetrologicalPower m = metrological_power(sq);
  double qfi = spectral_qfi(sq, quadrature_along(basis_of(sq), m.direction));
  EXPECT_NEAR(qfi, m.lambda_max, 1e-8);
  EXPECT_NEAR(std::abs(m.direction(1)), 1.0, 1e-8);  // x squeezed, so p carries the sensitivity
}

TEST(Gaussian, SqueezedThermalMatchesOracle) {
  GaussianState g = *gaussian_from_spec(StateSpec::squeezed_thermal(0.8, 0.0, 0.5, 10));
  EXPECT_NEAR(g.V(0, 0) / 2.0, 0.20189651799465538, 1e-12);
  EXPECT_NEAR(gaussian_metrological_power(g.V), 1.4765162121975575, 1e-10);
  EXPECT_NEAR(gaussian_metrological_power_direct(g.V), 1.4765162121975575, 1e-10);
  EXPECT_NEAR(critical_squeezing(0.5), 0.34657359027997264, 1e-15);
}

TEST(Gaussian, FockAgreement) {
  StateSpec s = StateSpec::squeezed_thermal(0.5, 0.3, 0.2, 70);
  GaussianState g = *gaussian_from_spec(s);
  GaussianState h = gaussian_moments(build_state(s));
  EXPECT_LT((g.V - h.V).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(gaussian_metrological_power_direct(g.V), m_of(s), 1e-6);
}

TEST(Gaussian, WilliamsonFormDiffersForNonDegenerateMultimode) {
  // Two modes with different thermal occupations, mixed by a beam splitter
  // after squeezing one of them.
  RMatrix v = RMatrix::Zero(4, 4);
  RMatrix s = squeeze_symplectic(0.6, 0.0);
  v.topLeftCorner(2, 2) = 1.2 * s * s.transpose();
  v.bottomRightCorner(2, 2) = 3.0 * RMatrix::Identity(2, 2);
  RMatrix o = quadrature_symplectic(PassiveUnitary::beam_splitter(2, 0, 1, 0.5, 0.0));
  RMatrix w = o * v * o.transpose();
  double direct = gaussian_metrological_power_direct(w);
  EXPECT_NEAR(direct, std::max(std::exp(1.2) / 1.2 - 1.0, 0.0), 1e-9);
  // the Williamson-form expression agrees only for degenerate spectra
  EXPECT_GT(std::abs(gaussian_metrological_power(w) - direct), 1e-3);
}

TEST(Gaussian, RejectsUnphysicalCovariance) {
  RMatrix v = 0.5 * RMatrix::Identity(2, 2);
  EXPECT_THROW(williamson(v), UnphysicalState);
}

TEST(SpecJson, ParseAndCanonicalHash) {
  StateSpec a = spec_from_string(R"({"state":{"alpha":[0.5,-0.25],"kind":"coherent"},"modes":1,"cutoff":20})");
  StateSpec b = spec_from_string(R"({"modes":1,"cutoff":20,"state":{"kind":"coherent","alpha":[0.5,-0.25]}})");
  EXPECT_EQ(spec_hash(a), spec_hash(b));
  EXPECT_EQ(a.alpha[0], Complex(0.5, -0.25));
  StateSpec sq = spec_from_string(R"({"modes":1,"cutoff":30,"state":{"kind":"squeezed_vacuum","r":0.3}})");
  EXPECT_EQ(sq.theta, 0.0);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(SpecJson, Rejections) {
  EXPECT_THROW(spec_from_string("{"), SpecError);
  EXPECT_THROW(spec_from_string(R"({"modes":1,"cutoff":10,"state":{"kind":"fock","n":1},"x":1})"), SpecError);
  EXPECT_THROW(spec_from_string(R"({"modes":1,"cutoff":10,"state":{"kind":"fock"}})"), SpecError);
  EXPECT_THROW(spec_from_string(R"({"modes":1,"cutoff":10,"state":{"kind":"banana"}})"), SpecError);
  EXPECT_THROW(spec_from_string(R"({"modes":2,"cutoff":[10],"state":{"kind":"vacuum"}})"), SpecError);
  EXPECT_THROW(spec_from_string(R"({"modes":1,"cutoff":10,"state":{"kind":"decohered_cat","alpha":1,"gamma":2}})"),
               SpecError);
}

TEST(SpecJson, MixtureRoundTrip) {
  const char* text = R"({"modes":1,"cutoff":20,"state":{"kind":"mixture","weights":[0.25,0.75],
      "components":[{"kind":"coherent","alpha":0.5},{"kind":"thermal","nbar":0.2}]}})";
  StateSpec s = spec_from_string(text);
  EXPECT_EQ(canonical_json(spec_from_json(spec_to_json(s))), canonical_json(s));
}

TEST(Csv, QuotingAndPrecision) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(std::stod(csv_number(0.1)), 0.1);
  EXPECT_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
  std::vector<SweepRow> rows = {{"f,g", 1.0, "M", 0.5, 1.0, 1.0, true, 0.75, false}};
  std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find("\r\n")),
            "family,parameter,measure,nbar,value,bound,saturated,converged,closed_form,abs_delta");
  EXPECT_NE(csv.find("\"f,g\",1,M,0.5,1,1,false,true,0.75,0.25\r\n"), std::string::npos);
}

TEST(ClosedForm, DecoheredCatZeros) {
  double a = 1.0;
  EXPECT_EQ(closed_form::decohered_cat_m(a, 0.0), 0.0);
  EXPECT_NEAR(closed_form::decohered_cat_m(a, -std::exp(-2.0)), 0.0, 1e-15);
  EXPECT_NEAR(closed_form::decohered_cat_m(a, 1.0), closed_form::cat_m(a, Parity::even), 1e-12);
  EXPECT_NEAR(closed_form::decohered_cat_m(a, -1.0), closed_form::cat_m(a, Parity::odd), 1e-12);
}

TEST(Truncation, LeakageReportFlagsSmallCutoff) {
  LeakageReport ok = leakage_report(StateSpec::fock(2, 24), 8);
  EXPECT_FALSE(ok.insufficient);
  EXPECT_TRUE(ok.converged());
  LeakageReport bad = leakage_report(StateSpec::coherent(2.0, 14), 8, false);
  EXPECT_TRUE(bad.insufficient);
}
