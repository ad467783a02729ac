#pragma once

#include <algorithm>
#include <cmath>

#include "states.hpp"

namespace ncvar::closed_form {

// Mean photon number of the even (odd) cat: |a|^2 tanh|a|^2 (coth|a|^2).
inline double cat_nbar(double abs_alpha, Parity p) {
  double a2 = abs_alpha * abs_alpha;
  return p == Parity::even ? a2 * std::tanh(a2) : a2 / std::tanh(a2);
}

inline double cat_m(double abs_alpha, Parity p) {
  return 2.0 * (cat_nbar(abs_alpha, p) + abs_alpha * abs_alpha);
}

inline double fock_m(int n) { return 2.0 * n; }

// rho_G = [|a><a| + |-a><-a| + G(|a><-a| + |-a><a|)] / N_G,
// N_G = 2 + 2 G e^{-2|a|^2}.
inline double decohered_cat_m(double abs_alpha, double gamma) {
  double a2 = abs_alpha * abs_alpha;
  double e = std::exp(-2.0 * a2);
  double ng = 2.0 + 2.0 * gamma * e;
  return std::max(16.0 * a2 * gamma * (gamma + e) / (ng * ng), 0.0);
}

inline double squeezed_thermal_m(double r, double nbar_th) {
  return std::max(std::exp(2.0 * r) / (2.0 * nbar_th + 1.0) - 1.0, 0.0);
}

}  // namespace ncvar::closed_form
