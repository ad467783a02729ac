#pragma once

#include <cmath>
#include <vector>

#include "fock.hpp"
#include "ops.hpp"
#include "random.hpp"
#include "states.hpp"

namespace ncvar {

// Two-mode Givens rotation on modes (mode, mode + 1), with the mixing matrix of
// a beam splitter: [[c, e^{i phi} s], [-e^{-i phi} s, c]].
struct GivensRotation {
  int mode;
  double theta;
  double phi;
};

// U = diag(e^{-i phases}) * T_K ... T_1, with `rotations` listed as T_1..T_K.
struct GivensDecomposition {
  std::vector<GivensRotation> rotations;
  std::vector<double> phases;
};

inline CMatrix beam_splitter_mixing(double theta, double phi) {
  CMatrix t(2, 2);
  double c = std::cos(theta), s = std::sin(theta);
  Complex e = std::exp(Complex(0.0, phi));
  t << c, e * s, -std::conj(e) * s, c;
  return t;
}

// Pairs (row, column) nulled by the triangular mesh, in application order.
inline std::vector<std::pair<int, int>> mesh_order(int n) {
  std::vector<std::pair<int, int>> order;
  for (int i = n - 1; i >= 1; --i) {
    for (int j = 0; j < i; ++j) order.push_back({i, j});
  }
  return order;
}

// Passive linear-optical unitary described by its mode-mixing matrix:
// U^dag a_m U = sum_n U_mn a_n.
class PassiveUnitary {
 public:
  explicit PassiveUnitary(CMatrix mixing, double tol = 1e-10) : u_(std::move(mixing)) {
    if (u_.rows() != u_.cols() || u_.rows() < 1) throw InvalidArgument("mixing matrix must be square");
    double dev = (u_.adjoint() * u_ - CMatrix::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
    if (dev > tol) throw NotUnitary("mixing matrix deviates from unitarity by " + std::to_string(dev));
  }

  static PassiveUnitary identity(int n) { return PassiveUnitary(CMatrix::Identity(n, n)); }

  static PassiveUnitary beam_splitter(int n, int m1, int m2, double theta, double phi) {
    if (m1 == m2 || m1 < 0 || m2 < 0 || m1 >= n || m2 >= n) {
      throw InvalidArgument("beam splitter needs two distinct valid modes");
    }
    CMatrix u = CMatrix::Identity(n, n);
    CMatrix t = beam_splitter_mixing(theta, phi);
    u(m1, m1) = t(0, 0);
    u(m1, m2) = t(0, 1);
    u(m2, m1) = t(1, 0);
    u(m2, m2) = t(1, 1);
    return PassiveUnitary(u);
  }

  static PassiveUnitary phase(int n, int mode, double theta) {
    if (mode < 0 || mode >= n) throw InvalidArgument("phase rotation mode out of range");
    CMatrix u = CMatrix::Identity(n, n);
    u(mode, mode) = std::exp(Complex(0.0, -theta));
    return PassiveUnitary(u);
  }

  static PassiveUnitary random(int n, Rng& rng) { return PassiveUnitary(random_unitary(n, rng), 1e-9); }

  static PassiveUnitary from_decomposition(int n, const GivensDecomposition& g) {
    CMatrix u = CMatrix::Identity(n, n);
    for (const auto& rot : g.rotations) {
      CMatrix t = CMatrix::Identity(n, n);
      t.block(rot.mode, rot.mode, 2, 2) = beam_splitter_mixing(rot.theta, rot.phi);
      u = t * u;
    }
    for (int m = 0; m < n; ++m) u.row(m) *= std::exp(Complex(0.0, -g.phases.at(m)));
    return PassiveUnitary(u, 1e-9);
  }

  // Mesh parameter vector of length n^2: (theta_k, phi_k) for each rotation in
  // mesh order, then the n output phases.
  static PassiveUnitary from_mesh(int n, const std::vector<double>& params) {
    auto order = mesh_order(n);
    if (params.size() != static_cast<std::size_t>(n * n)) {
      throw InvalidArgument("mesh parameter vector must have n^2 entries");
    }
    GivensDecomposition g;
    for (std::size_t k = 0; k < order.size(); ++k) {
      g.rotations.push_back({order[k].second, params[2 * k], params[2 * k + 1]});
    }
    g.phases.assign(params.begin() + 2 * order.size(), params.end());
    return from_decomposition(n, g);
  }

  // Unitary whose first row equals `row` (a unit vector), completed
  // deterministically by Householder QR.
  static PassiveUnitary with_first_row(const CVector& row) {
    int n = static_cast<int>(row.size());
    if (std::abs(row.norm() - 1.0) > 1e-9) throw InvalidArgument("first row must be a unit vector");
    CMatrix m = CMatrix::Identity(n, n);
    m.col(0) = row.conjugate();
    Eigen::HouseholderQR<CMatrix> qr(m);
    CMatrix q = qr.householderQ();
    CMatrix u = q.adjoint();
    u.row(0) = row.transpose();
    return PassiveUnitary(u, 1e-9);
  }

  int num_modes() const { return static_cast<int>(u_.rows()); }
  const CMatrix& matrix() const { return u_; }

  PassiveUnitary operator*(const PassiveUnitary& o) const { return PassiveUnitary(u_ * o.u_, 1e-9); }
  PassiveUnitary adjoint() const { return PassiveUnitary(u_.adjoint(), 1e-9); }

  // Triangular Givens mesh: null U(i, j) for rows i = n-1..1, columns j < i by
  // right-multiplying with T^dag on columns (j, j+1). Ties (a zero pivot) take
  // theta = 0, or theta = pi/2 when the right neighbour is zero.
  GivensDecomposition decompose() const {
    int n = num_modes();
    CMatrix w = u_;
    GivensDecomposition g;
    for (auto [i, j] : mesh_order(n)) {
      Complex a = w(i, j), b = w(i, j + 1);
      double theta = 0.0, phi = 0.0;
      if (std::abs(a) < 1e-15) {
        theta = 0.0;
      } else if (std::abs(b) < 1e-15) {
        theta = kPi / 2;
      } else {
        theta = std::atan2(std::abs(a), std::abs(b));
        phi = std::arg(b) - std::arg(a) + kPi;
      }
      CMatrix td = beam_splitter_mixing(theta, phi).adjoint();
      CMatrix cols = w.middleCols(j, 2) * td;
      w.middleCols(j, 2) = cols;
      g.rotations.push_back({j, theta, phi});
    }
    for (int m = 0; m < n; ++m) g.phases.push_back(-std::arg(w(m, m)));
    return g;
  }

  std::vector<double> mesh_params() const {
    GivensDecomposition g = decompose();
    std::vector<double> p;
    for (const auto& r : g.rotations) {
      p.push_back(r.theta);
      p.push_back(r.phi);
    }
    p.insert(p.end(), g.phases.begin(), g.phases.end());
    return p;
  }

 private:
  CMatrix u_;
};

// Heisenberg action on quadratures: U^dag R U = S R with S real orthogonal
// symplectic, blocks [[Re u, -Im u], [Im u, Re u]].
inline RMatrix quadrature_symplectic(const PassiveUnitary& u) {
  int n = u.num_modes();
  RMatrix s(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      Complex z = u.matrix()(m, k);
      s(2 * m, 2 * k) = z.real();
      s(2 * m, 2 * k + 1) = -z.imag();
      s(2 * m + 1, 2 * k) = z.imag();
      s(2 * m + 1, 2 * k + 1) = z.real();
    }
  }
  return s;
}

// Passive part followed by displacements: [prod_n D_n(alpha_n)] U^0.
struct LinOpticalUnitary {
  PassiveUnitary passive;
  std::vector<Complex> displacement;

  explicit LinOpticalUnitary(PassiveUnitary p, std::vector<Complex> d = {})
      : passive(std::move(p)), displacement(std::move(d)) {
    if (displacement.empty()) displacement.assign(passive.num_modes(), 0.0);
    if (static_cast<int>(displacement.size()) != passive.num_modes()) {
      throw InvalidArgument("one displacement amplitude per mode required");
    }
  }

  int num_modes() const { return passive.num_modes(); }

  double budget() const {
    double b = 0.0;
    for (const auto& a : displacement) b += std::norm(a);
    return std::sqrt(b);
  }
};

// ---------------------------------------------------------------------------
// Fock-space action

inline State apply_displacement(const State& s, int mode, Complex beta, double* loss = nullptr) {
  const FockBasis& b = basis_of(s);
  b.check_mode(mode);
  return apply_local_op(s, {mode}, displacement_matrix(b.cutoff(mode), beta), loss);
}

inline State apply_phase_rotation(const State& s, int mode, double theta) {
  const FockBasis& b = basis_of(s);
  return apply_local_op(s, {b.check_mode(mode)}, phase_matrix(b.cutoff(mode), theta));
}

inline State apply_beam_splitter(const State& s, int m1, int m2, double theta, double phi) {
  const FockBasis& b = basis_of(s);
  b.check_mode(m1);
  b.check_mode(m2);
  if (m1 == m2) throw InvalidArgument("beam splitter needs two distinct modes");
  return apply_local_op(s, {m1, m2}, beam_splitter_matrix(b.cutoff(m1), b.cutoff(m2), theta, phi));
}

inline State apply_squeeze(const State& s, int mode, Complex xi, double* loss = nullptr) {
  const FockBasis& b = basis_of(s);
  return apply_local_op(s, {b.check_mode(mode)}, squeeze_matrix(b.cutoff(mode), xi), loss);
}

inline State apply_passive(const State& s, const PassiveUnitary& u) {
  const FockBasis& b = basis_of(s);
  if (u.num_modes() != b.num_modes()) throw InvalidArgument("passive unitary mode count mismatch");
  GivensDecomposition g = u.decompose();
  State out = s;
  for (const auto& r : g.rotations) {
    if (std::abs(r.theta) < 1e-15) continue;
    out = apply_beam_splitter(out, r.mode, r.mode + 1, r.theta, r.phi);
  }
  for (int m = 0; m < b.num_modes(); ++m) {
    if (std::abs(std::remainder(g.phases[m], 2 * kPi)) > 1e-15) out = apply_phase_rotation(out, m, g.phases[m]);
  }
  return out;
}

inline State apply_linear_optics(const State& s, const LinOpticalUnitary& u, double* loss = nullptr) {
  State out = apply_passive(s, u.passive);
  double total = 0.0;
  for (int m = 0; m < u.num_modes(); ++m) {
    if (u.displacement[m] == Complex(0.0)) continue;
    double l = 0.0;
    out = apply_displacement(out, m, u.displacement[m], &l);
    total += l;
  }
  if (loss) *loss = total;
  return out;
}

// Dense matrix of a local operator on the full space (small bases only).
inline CMatrix local_to_full(const FockBasis& b, const std::vector<int>& modes, const CMatrix& op) {
  check_entries(b.dim() * b.dim(), "dense operator");
  CMatrix m = CMatrix::Identity(b.dim(), b.dim());
  apply_local(b, modes, op, m);
  return m;
}

inline CMatrix displacement_unitary(const FockBasis& b, int mode, Complex beta) {
  return local_to_full(b, {b.check_mode(mode)}, displacement_matrix(b.cutoff(mode), beta));
}

inline CMatrix beam_splitter_unitary(const FockBasis& b, int m1, int m2, double theta, double phi) {
  return local_to_full(b, {b.check_mode(m1), b.check_mode(m2)},
                       beam_splitter_matrix(b.cutoff(m1), b.cutoff(m2), theta, phi));
}

inline CMatrix phase_rotation_unitary(const FockBasis& b, int mode, double theta) {
  return local_to_full(b, {b.check_mode(mode)}, phase_matrix(b.cutoff(mode), theta));
}

inline CMatrix passive_unitary_to_fock(const FockBasis& b, const PassiveUnitary& u) {
  if (u.num_modes() != b.num_modes()) throw InvalidArgument("passive unitary mode count mismatch");
  check_entries(b.dim() * b.dim(), "dense operator");
  CMatrix m = CMatrix::Identity(b.dim(), b.dim());
  GivensDecomposition g = u.decompose();
  for (const auto& r : g.rotations) {
    apply_local(b, {r.mode, r.mode + 1},
                beam_splitter_matrix(b.cutoff(r.mode), b.cutoff(r.mode + 1), r.theta, r.phi), m);
  }
  for (int k = 0; k < b.num_modes(); ++k) apply_local(b, {k}, phase_matrix(b.cutoff(k), g.phases[k]), m);
  return m;
}

// Passive unitary taking the coherent amplitude vector alpha to
// (|alpha|, 0, ..., 0).
inline PassiveUnitary concentrating_unitary(const std::vector<Complex>& alpha) {
  CVector a(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) a(i) = alpha[i];
  double norm = a.norm();
  if (norm == 0.0) return PassiveUnitary::identity(static_cast<int>(alpha.size()));
  return PassiveUnitary::with_first_row(a.conjugate() / norm);
}

// ---------------------------------------------------------------------------
// Linear optical channel: Tr_E[U (rho_A (x) sigma_E) U^dag] with a classical
// ancilla sigma_E on the trailing modes.
inline DensityMatrix apply_channel_phiL(const State& rho_a, const StateSpec& ancilla,
                                        const LinOpticalUnitary& u) {
  if (!ancilla.is_classical_kind()) {
    throw NonClassicalAncilla(std::string("ancilla kind '") + kind_name(ancilla.kind) +
                              "' is not a classical state");
  }
  int na = basis_of(rho_a).num_modes();
  if (u.num_modes() != na + ancilla.modes) {
    throw InvalidArgument("channel unitary must act on system plus ancilla modes");
  }
  State sigma = build_state(ancilla);
  State joint = tensor(rho_a, sigma);
  State out = apply_linear_optics(joint, u);
  std::vector<int> keep(na);
  for (int m = 0; m < na; ++m) keep[m] = m;
  DensityMatrix r = partial_trace(out, keep);
  return DensityMatrix::normalized(r.basis(), r.matrix());
}

}  // namespace ncvar
