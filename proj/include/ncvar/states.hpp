#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fock.hpp"
#include "ops.hpp"

namespace ncvar {

enum class StateKind {
  vacuum,
  coherent,
  fock,
  cat,
  decohered_cat,
  noon,
  entangled_coherent,
  squeezed_vacuum,
  thermal,
  squeezed_thermal,
  squeezed_coherent,
  photon_added_coherent,
  fock_plus_coherent,
  mixture
};

enum class Parity { even, odd };

inline const char* kind_name(StateKind k) {
  switch (k) {
    case StateKind::vacuum: return "vacuum";
    case StateKind::coherent: return "coherent";
    case StateKind::fock: return "fock";
    case StateKind::cat: return "cat";
    case StateKind::decohered_cat: return "decohered_cat";
    case StateKind::noon: return "noon";
    case StateKind::entangled_coherent: return "entangled_coherent";
    case StateKind::squeezed_vacuum: return "squeezed_vacuum";
    case StateKind::thermal: return "thermal";
    case StateKind::squeezed_thermal: return "squeezed_thermal";
    case StateKind::squeezed_coherent: return "squeezed_coherent";
    case StateKind::photon_added_coherent: return "photon_added_coherent";
    case StateKind::fock_plus_coherent: return "fock_plus_coherent";
    case StateKind::mixture: return "mixture";
  }
  return "unknown";
}

inline std::optional<StateKind> kind_from_name(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(StateKind::mixture); ++k) {
    auto kind = static_cast<StateKind>(k);
    if (s == kind_name(kind)) return kind;
  }
  return std::nullopt;
}

// Declarative description of a state. Only the fields relevant to `kind` are
// read; validate() checks that they are complete and in range.
struct StateSpec {
  StateKind kind = StateKind::vacuum;
  int modes = 1;
  std::vector<int> cutoffs{1};
  std::vector<Complex> alpha;
  std::vector<int> n;
  Parity parity = Parity::even;
  double gamma = 0.0;
  double r = 0.0;
  double theta = 0.0;
  std::vector<double> nbar;
  std::vector<double> weights;
  std::vector<StateSpec> components;

  Complex xi() const { return std::polar(r, theta); }

  static StateSpec make(StateKind kind, int modes, int cutoff) {
    StateSpec s;
    s.kind = kind;
    s.modes = modes;
    s.cutoffs.assign(modes, cutoff);
    return s;
  }
  static StateSpec vacuum(int modes, int cutoff) { return make(StateKind::vacuum, modes, cutoff); }
  static StateSpec coherent(std::vector<Complex> alpha, int cutoff) {
    StateSpec s = make(StateKind::coherent, static_cast<int>(alpha.size()), cutoff);
    s.alpha = std::move(alpha);
    return s;
  }
  static StateSpec coherent(Complex alpha, int cutoff) { return coherent(std::vector<Complex>{alpha}, cutoff); }
  static StateSpec fock(std::vector<int> n, int cutoff) {
    StateSpec s = make(StateKind::fock, static_cast<int>(n.size()), cutoff);
    s.n = std::move(n);
    return s;
  }
  static StateSpec fock(int n, int cutoff) { return fock(std::vector<int>{n}, cutoff); }
  static StateSpec cat(Complex alpha, Parity parity, int cutoff) {
    StateSpec s = make(StateKind::cat, 1, cutoff);
    s.alpha = {alpha};
    s.parity = parity;
    return s;
  }
  static StateSpec decohered_cat(Complex alpha, double gamma, int cutoff) {
    StateSpec s = make(StateKind::decohered_cat, 1, cutoff);
    s.alpha = {alpha};
    s.gamma = gamma;
    return s;
  }
  static StateSpec noon(int n, int cutoff) {
    StateSpec s = make(StateKind::noon, 2, cutoff);
    s.n = {n};
    return s;
  }
  static StateSpec entangled_coherent(std::vector<Complex> alpha, Parity parity, int cutoff) {
    StateSpec s = make(StateKind::entangled_coherent, static_cast<int>(alpha.size()), cutoff);
    s.alpha = std::move(alpha);
    s.parity = parity;
    return s;
  }
  static StateSpec squeezed_vacuum(double r, double theta, int cutoff) {
    StateSpec s = make(StateKind::squeezed_vacuum, 1, cutoff);
    s.r = r;
    s.theta = theta;
    return s;
  }
  static StateSpec thermal(std::vector<double> nbar, int cutoff) {
    StateSpec s = make(StateKind::thermal, static_cast<int>(nbar.size()), cutoff);
    s.nbar = std::move(nbar);
    return s;
  }
  static StateSpec thermal(double nbar, int cutoff) { return thermal(std::vector<double>{nbar}, cutoff); }
  static StateSpec squeezed_thermal(double r, double theta, double nbar, int cutoff) {
    StateSpec s = make(StateKind::squeezed_thermal, 1, cutoff);
    s.r = r;
    s.theta = theta;
    s.nbar = {nbar};
    return s;
  }
  static StateSpec squeezed_coherent(double r, double theta, Complex alpha, int cutoff) {
    StateSpec s = make(StateKind::squeezed_coherent, 1, cutoff);
    s.r = r;
    s.theta = theta;
    s.alpha = {alpha};
    return s;
  }
  static StateSpec photon_added_coherent(Complex alpha, int cutoff) {
    StateSpec s = make(StateKind::photon_added_coherent, 1, cutoff);
    s.alpha = {alpha};
    return s;
  }
  static StateSpec fock_plus_coherent(int n, Complex alpha, int cutoff) {
    StateSpec s = make(StateKind::fock_plus_coherent, 1, cutoff);
    s.n = {n};
    s.alpha = {alpha};
    return s;
  }
  static StateSpec mixture(std::vector<double> weights, std::vector<StateSpec> components) {
    if (components.empty()) throw InvalidArgument("mixture needs at least one component");
    StateSpec s = make(StateKind::mixture, components[0].modes, 1);
    s.cutoffs = components[0].cutoffs;
    s.weights = std::move(weights);
    s.components = std::move(components);
    return s;
  }

  StateSpec with_cutoffs(std::vector<int> c) const {
    StateSpec s = *this;
    s.cutoffs = std::move(c);
    return s;
  }
  StateSpec with_cutoff(int c) const { return with_cutoffs(std::vector<int>(modes, c)); }
  StateSpec enlarged(int delta) const {
    std::vector<int> c = cutoffs;
    for (int& d : c) d += delta;
    return with_cutoffs(c);
  }

  bool is_pure_kind() const {
    switch (kind) {
      case StateKind::decohered_cat:
      case StateKind::thermal:
      case StateKind::squeezed_thermal:
      case StateKind::mixture:
        return false;
      default:
        return true;
    }
  }

  bool is_gaussian() const {
    switch (kind) {
      case StateKind::vacuum:
      case StateKind::coherent:
      case StateKind::thermal:
      case StateKind::squeezed_vacuum:
      case StateKind::squeezed_thermal:
      case StateKind::squeezed_coherent:
        return true;
      default:
        return false;
    }
  }

  // Classical by construction: coherent, thermal, and their mixtures.
  bool is_classical_kind() const {
    switch (kind) {
      case StateKind::vacuum:
      case StateKind::coherent:
      case StateKind::thermal:
        return true;
      case StateKind::mixture:
        for (const auto& c : components) {
          if (!c.is_classical_kind()) return false;
        }
        return true;
      default:
        return false;
    }
  }

  void validate() const {
    auto fail = [this](const std::string& msg) {
      throw InvalidArgument(std::string(kind_name(kind)) + ": " + msg);
    };
    if (modes < 1) fail("modes must be positive");
    if (static_cast<int>(cutoffs.size()) != modes) fail("need one cutoff per mode");
    for (int d : cutoffs) {
      if (d < 1) fail("cutoffs must be positive");
    }
    auto single_mode = [&] {
      if (modes != 1) fail("this kind is single-mode");
    };
    auto need_alpha = [&](std::size_t count) {
      if (alpha.size() != count) fail("expected " + std::to_string(count) + " alpha value(s)");
      for (const auto& a : alpha) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) fail("alpha must be finite");
      }
    };
    auto need_squeeze = [&] {
      if (!std::isfinite(r) || r < 0) fail("r must be a nonnegative number");
      if (!std::isfinite(theta)) fail("theta must be finite");
    };
    auto need_nbar = [&](std::size_t count) {
      if (nbar.size() != count) fail("expected " + std::to_string(count) + " nbar value(s)");
      for (double v : nbar) {
        if (!std::isfinite(v) || v < 0) fail("nbar must be nonnegative");
      }
    };
    switch (kind) {
      case StateKind::vacuum:
        break;
      case StateKind::coherent:
        need_alpha(modes);
        break;
      case StateKind::fock:
        if (static_cast<int>(n.size()) != modes) fail("need one occupation per mode");
        for (int v : n) {
          if (v < 0) fail("occupations must be nonnegative");
        }
        break;
      case StateKind::cat:
        single_mode();
        need_alpha(1);
        if (alpha[0] == Complex(0.0) && parity == Parity::odd) fail("odd cat needs alpha != 0");
        break;
      case StateKind::decohered_cat:
        single_mode();
        need_alpha(1);
        if (!(std::abs(gamma) <= 1.0)) fail("|gamma| must not exceed 1");
        break;
      case StateKind::noon:
        if (modes != 2) fail("NOON states have two modes");
        if (n.size() != 1 || n[0] < 1) fail("n must be a positive integer");
        break;
      case StateKind::entangled_coherent:
        if (modes < 2) fail("entangled coherent states need at least two modes");
        need_alpha(modes);
        break;
      case StateKind::squeezed_vacuum:
        single_mode();
        need_squeeze();
        break;
      case StateKind::thermal:
        need_nbar(modes);
        break;
      case StateKind::squeezed_thermal:
        single_mode();
        need_squeeze();
        need_nbar(1);
        break;
      case StateKind::squeezed_coherent:
        single_mode();
        need_squeeze();
        need_alpha(1);
        break;
      case StateKind::photon_added_coherent:
        single_mode();
        need_alpha(1);
        break;
      case StateKind::fock_plus_coherent:
        single_mode();
        if (n.size() != 1 || n[0] < 0) fail("n must be a nonnegative integer");
        need_alpha(1);
        break;
      case StateKind::mixture: {
        if (components.empty()) fail("mixture needs components");
        if (weights.size() != components.size()) fail("need one weight per component");
        double total = 0.0;
        for (double w : weights) {
          if (!(w >= 0)) fail("weights must be nonnegative");
          total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) fail("weights must sum to 1");
        for (const auto& c : components) {
          if (c.modes != modes) fail("components must have the same number of modes");
          c.with_cutoffs(cutoffs).validate();
        }
        break;
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Factory

struct BuiltState {
  State state;
  double leakage;  // weight of the exact state outside the truncation
};

namespace detail {

// Truncated coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
inline CVector coherent_amplitudes(Complex alpha, int d) {
  CVector v(d);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < d; ++k) v(k) = v(k - 1) * alpha / std::sqrt(double(k));
  return v;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector v(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a(i) * b;
  return v;
}

inline CVector product_coherent(const std::vector<Complex>& alpha, const std::vector<int>& cutoffs) {
  CVector v = coherent_amplitudes(alpha[0], cutoffs[0]);
  for (std::size_t m = 1; m < alpha.size(); ++m) v = kron(v, coherent_amplitudes(alpha[m], cutoffs[m]));
  return v;
}

inline CMatrix squeeze_full(int D, Complex xi) {
  CMatrix a = ladder_matrix(D);
  CMatrix gen = 0.5 * (std::conj(xi) * a * a - xi * a.adjoint() * a.adjoint());
  std::vector<int> parity(D);
  for (int k = 0; k < D; ++k) parity[k] = k % 2;
  return block_expm(gen, parity);
}

inline BuiltState pure_from(const FockBasis& basis, const CVector& unnormalized, double exact_norm2) {
  double n2 = unnormalized.squaredNorm();
  double leak = std::max(0.0, 1.0 - n2 / exact_norm2);
  if (n2 == 0.0) throw CutoffTooSmall("state has no weight inside the cutoff", 1.0);
  return {FockState(basis, unnormalized / std::sqrt(n2)), leak};
}

inline BuiltState mixed_from(const FockBasis& basis, const CMatrix& unnormalized, double exact_trace) {
  double tr = unnormalized.trace().real();
  double leak = std::max(0.0, 1.0 - tr / exact_trace);
  if (tr <= 0.0) throw CutoffTooSmall("state has no weight inside the cutoff", 1.0);
  CMatrix m = unnormalized / tr;
  return {DensityMatrix(basis, 0.5 * (m + m.adjoint())), leak};
}

}  // namespace detail

// Builds the state and reports the weight lost to truncation, without
// enforcing any leakage tolerance.
inline BuiltState build_state_with_leakage(const StateSpec& spec) {
  spec.validate();
  FockBasis basis(spec.cutoffs);
  const auto& c = spec.cutoffs;
  switch (spec.kind) {
    case StateKind::vacuum:
      return {FockState::vacuum(basis), 0.0};
    case StateKind::coherent:
      return detail::pure_from(basis, detail::product_coherent(spec.alpha, c), 1.0);
    case StateKind::fock: {
      for (int m = 0; m < spec.modes; ++m) {
        if (spec.n[m] >= c[m]) throw CutoffTooSmall("Fock occupation exceeds cutoff", 1.0);
      }
      return {FockState::basis_state(basis, spec.n), 0.0};
    }
    case StateKind::cat: {
      Complex a = spec.alpha[0];
      double sign = spec.parity == Parity::even ? 1.0 : -1.0;
      CVector v = detail::coherent_amplitudes(a, c[0]) + sign * detail::coherent_amplitudes(-a, c[0]);
      return detail::pure_from(basis, v, 2.0 + sign * 2.0 * std::exp(-2.0 * std::norm(a)));
    }
    case StateKind::decohered_cat: {
      Complex a = spec.alpha[0];
      CVector p = detail::coherent_amplitudes(a, c[0]);
      CVector q = detail::coherent_amplitudes(-a, c[0]);
      CMatrix m = p * p.adjoint() + q * q.adjoint() + spec.gamma * (p * q.adjoint() + q * p.adjoint());
      double norm = 2.0 + 2.0 * spec.gamma * std::exp(-2.0 * std::norm(a));
      if (norm <= 0.0) throw InvalidArgument("decohered_cat: vanishing normalization");
      return detail::mixed_from(basis, m, norm);
    }
    case StateKind::noon: {
      int n = spec.n[0];
      if (n >= c[0] || n >= c[1]) throw CutoffTooSmall("NOON occupation exceeds cutoff", 1.0);
      CVector v = CVector::Zero(basis.dim());
      v(basis.index({n, 0})) = 1.0 / std::sqrt(2.0);
      v(basis.index({0, n})) = 1.0 / std::sqrt(2.0);
      return {FockState(basis, v), 0.0};
    }
    case StateKind::entangled_coherent: {
      std::vector<Complex> minus;
      double total = 0.0;
      for (const auto& a : spec.alpha) {
        minus.push_back(-a);
        total += std::norm(a);
      }
      double sign = spec.parity == Parity::even ? 1.0 : -1.0;
      CVector v = detail::product_coherent(spec.alpha, c) + sign * detail::product_coherent(minus, c);
      double norm2 = 2.0 + sign * 2.0 * std::exp(-2.0 * total);
      if (norm2 <= 0.0) throw InvalidArgument("entangled_coherent: vanishing normalization");
      return detail::pure_from(basis, v, norm2);
    }
    case StateKind::squeezed_vacuum: {
      int D = c[0] + squeeze_padding(c[0], spec.r);
      CMatrix S = detail::squeeze_full(D, spec.xi());
      CVector v = S.col(0).head(c[0]);
      return detail::pure_from(basis, v, S.col(0).squaredNorm());
    }
    case StateKind::thermal: {
      check_entries(basis.dim() * basis.dim(), "thermal state");
      CVector diag = CVector::Ones(1);
      for (int m = 0; m < spec.modes; ++m) {
        double nb = spec.nbar[m];
        CVector p(c[m]);
        for (int k = 0; k < c[m]; ++k) p(k) = std::pow(nb, k) / std::pow(1.0 + nb, k + 1);
        diag = detail::kron(diag, p);
      }
      CMatrix m = diag.asDiagonal();
      return detail::mixed_from(basis, m, 1.0);
    }
    case StateKind::squeezed_thermal: {
      int D = c[0] + squeeze_padding(c[0], spec.r) + 40;
      double nb = spec.nbar[0];
      CMatrix S = detail::squeeze_full(D, spec.xi());
      RVector p(D);
      for (int k = 0; k < D; ++k) p(k) = std::pow(nb, k) / std::pow(1.0 + nb, k + 1);
      CMatrix rho = S * p.asDiagonal() * S.adjoint();
      return detail::mixed_from(basis, rho.topLeftCorner(c[0], c[0]), rho.trace().real());
    }
    case StateKind::squeezed_coherent: {
      Complex a = spec.alpha[0];
      int D = c[0] + squeeze_padding(c[0], spec.r) + displacement_padding(0, a);
      CMatrix S = detail::squeeze_full(D, spec.xi());
      CVector full = S * detail::coherent_amplitudes(a, D);
      return detail::pure_from(basis, full.head(c[0]), full.squaredNorm());
    }
    case StateKind::photon_added_coherent: {
      Complex a = spec.alpha[0];
      CVector coh = detail::coherent_amplitudes(a, c[0]);
      CVector v = CVector::Zero(c[0]);
      for (int k = 1; k < c[0]; ++k) v(k) = std::sqrt(double(k)) * coh(k - 1);
      return detail::pure_from(basis, v, 1.0 + std::norm(a));
    }
    case StateKind::fock_plus_coherent: {
      int n = spec.n[0];
      if (n >= c[0]) throw CutoffTooSmall("Fock occupation exceeds cutoff", 1.0);
      Complex a = spec.alpha[0];
      CVector v = detail::coherent_amplitudes(a, c[0]);
      // <n|alpha> from the untruncated series
      Complex overlap = std::exp(-0.5 * std::norm(a));
      for (int k = 1; k <= n; ++k) overlap *= a / std::sqrt(double(k));
      v(n) += 1.0;
      return detail::pure_from(basis, v, 2.0 + 2.0 * overlap.real());
    }
    case StateKind::mixture: {
      CMatrix m = CMatrix::Zero(basis.dim(), basis.dim());
      check_entries(basis.dim() * basis.dim(), "mixture");
      double leak = 0.0;
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        BuiltState b = build_state_with_leakage(spec.components[i].with_cutoffs(c));
        leak += spec.weights[i] * b.leakage;
        m += spec.weights[i] * (1.0 - b.leakage) * to_density(b.state).matrix();
      }
      BuiltState out = detail::mixed_from(basis, m, 1.0);
      out.leakage = leak;
      return out;
    }
  }
  throw InvalidArgument("unknown state kind");
}

inline State build_state(const StateSpec& spec, double leakage_tol = 1e-8) {
  BuiltState b = build_state_with_leakage(spec);
  if (b.leakage > leakage_tol) {
    throw CutoffTooSmall(std::string(kind_name(spec.kind)) + ": cutoff too small", b.leakage);
  }
  return std::move(b.state);
}

// Smallest uniform cutoff (searched from `start` in steps of `step`) whose
// factory leakage is below `tol`.
inline int minimal_cutoff(const StateSpec& spec, double tol = 1e-12, int start = 8, int step = 4,
                          int limit = 400) {
  for (int d = start; d <= limit; d += step) {
    try {
      BuiltState b = build_state_with_leakage(spec.with_cutoff(d));
      if (b.leakage < tol) return d;
    } catch (const CutoffTooSmall&) {
    }
  }
  throw CutoffTooSmall("no admissible cutoff below " + std::to_string(limit), 1.0);
}

// Classical ancillas that are finite mixtures of coherent states, as
// (weight, per-mode amplitudes) pairs. Empty when the spec is not of that form.
inline std::vector<std::pair<double, std::vector<Complex>>> coherent_ensemble(const StateSpec& spec) {
  std::vector<std::pair<double, std::vector<Complex>>> out;
  switch (spec.kind) {
    case StateKind::vacuum:
      out.push_back({1.0, std::vector<Complex>(spec.modes, 0.0)});
      break;
    case StateKind::coherent:
      out.push_back({1.0, spec.alpha});
      break;
    case StateKind::thermal: {
      bool zero = true;
      for (double v : spec.nbar) zero = zero && v == 0.0;
      if (zero) out.push_back({1.0, std::vector<Complex>(spec.modes, 0.0)});
      break;
    }
    case StateKind::mixture:
      for (std::size_t i = 0; i < spec.components.size(); ++i) {
        auto sub = coherent_ensemble(spec.components[i]);
        if (sub.empty()) return {};
        for (auto& [w, a] : sub) out.push_back({w * spec.weights[i], a});
      }
      break;
    default:
      break;
  }
  return out;
}

}  // namespace ncvar
