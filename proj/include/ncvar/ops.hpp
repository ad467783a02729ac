#pragma once

#include <cmath>
#include <map>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "types.hpp"

namespace ncvar {

// Matrix exponential of a generator that is block diagonal with respect to
// `label`; each block goes through Eigen's scaling-and-squaring Pade path.
inline CMatrix block_expm(const CMatrix& gen, const std::vector<int>& label) {
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < label.size(); ++i) groups[label[i]].push_back(static_cast<Eigen::Index>(i));
  CMatrix out = CMatrix::Zero(gen.rows(), gen.cols());
  for (const auto& [key, idx] : groups) {
    CMatrix sub = gen(idx, idx);
    CMatrix e = sub.exp();
    out(idx, idx) = e;
  }
  return out;
}

inline CMatrix ladder_matrix(int d) {
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// Padding used when a single-mode unitary is exponentiated at a larger
// internal cutoff and cropped back.
inline int displacement_padding(int d, Complex beta) {
  double b = std::abs(beta);
  return std::max(32, d) + static_cast<int>(std::ceil(2 * b * b + 8 * b));
}

inline int squeeze_padding(int d, double r) {
  return std::max(40, d) + static_cast<int>(std::ceil(20 * r));
}

// exp(beta a^dag - beta^* a), built at cutoff d + pad and cropped to d.
inline CMatrix displacement_matrix(int d, Complex beta, int pad = -1) {
  int D = d + (pad < 0 ? displacement_padding(d, beta) : pad);
  CMatrix a = ladder_matrix(D);
  CMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
  CMatrix e = gen.exp();
  return e.topLeftCorner(d, d);
}

// Squeezer with xi = r e^{i theta}: exp[(xi^* a^2 - xi a^dag^2)/2]. Real positive
// r squeezes x.
inline CMatrix squeeze_matrix(int d, Complex xi, int pad = -1) {
  int D = d + (pad < 0 ? squeeze_padding(d, std::abs(xi)) : pad);
  CMatrix a = ladder_matrix(D);
  CMatrix gen = 0.5 * (std::conj(xi) * a * a - xi * a.adjoint() * a.adjoint());
  std::vector<int> parity(D);
  for (int n = 0; n < D; ++n) parity[n] = n % 2;
  CMatrix e = block_expm(gen, parity);
  return e.topLeftCorner(d, d);
}

// exp(-i theta n)
inline CMatrix phase_matrix(int d, double theta) {
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = std::exp(Complex(0.0, -theta * n));
  return m;
}

// exp[theta (e^{i phi} a1^dag a2 - e^{-i phi} a1 a2^dag)] on a d1*d2 local space
// (index n1 * d2 + n2). Exact on every block of total photon number below
// min(d1, d2).
inline CMatrix beam_splitter_matrix(int d1, int d2, double theta, double phi) {
  int L = d1 * d2;
  CMatrix gen = CMatrix::Zero(L, L);
  Complex e = std::exp(Complex(0.0, phi));
  std::vector<int> total(L);
  for (int n1 = 0; n1 < d1; ++n1) {
    for (int n2 = 0; n2 < d2; ++n2) {
      int i = n1 * d2 + n2;
      total[i] = n1 + n2;
      // a1^dag a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
      if (n1 + 1 < d1 && n2 > 0) {
        int j = (n1 + 1) * d2 + (n2 - 1);
        double amp = std::sqrt(double(n1 + 1) * n2);
        gen(j, i) += theta * e * amp;
        gen(i, j) -= theta * std::conj(e) * amp;
      }
    }
  }
  return block_expm(gen, total);
}

}  // namespace ncvar
