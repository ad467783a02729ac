#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "types.hpp"

namespace ncvar {

// Philox4x32-10 counter-based generator. A (seed, stream) pair fixes the key
// and the upper counter words, so independent streams never overlap.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  static Counter block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
  }

  result_type operator()() {
    if (pos_ == 4) {
      buf_ = block(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    std::uint64_t hi = (*this)() >> 5;
    std::uint64_t lo = (*this)() >> 6;
    return (hi * 67108864.0 + lo) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal by Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return rad * std::cos(2.0 * kPi * u2);
  }

  Complex complex_normal() { return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)}; }

 private:
  Key key_;
  Counter ctr_;
  Counter buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

using Rng = Philox4x32;

// Haar-random unitary via QR of a complex Ginibre matrix with the phase fix.
inline CMatrix random_unitary(int n, Rng& rng) {
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0));
  }
  return q;
}

}  // namespace ncvar
