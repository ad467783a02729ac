#pragma once

#include <cmath>
#include <cstdint>

#include "gaussian.hpp"
#include "random.hpp"

namespace ncvar {

// Homodyne estimation of theta in exp(-i theta X_mu) applied to a Gaussian
// state. The shift moves the quadrature along Omega^T mu by -theta; the
// measured direction defaults to that conjugate quadrature.
struct HomodyneExperiment {
  GaussianState state;
  RVector mu;
  RVector measured;  // empty: Omega^T mu
  double theta = 0.0;
  long shots = 100000;
  int trials = 200;
  std::uint64_t seed = 1;
};

struct EstimationResult {
  double var_hat;       // empirical variance of the per-trial estimator
  double mean_estimate; // average of the per-trial estimates
  double qfi;           // I_F(rho, X_mu)
  double homodyne_fi;   // classical Fisher information of one homodyne sample
  double ratio;         // var_hat * shots * qfi, >= 1 by the Cramer-Rao bound
};

inline EstimationResult simulate_and_estimate(const HomodyneExperiment& e) {
  const RMatrix& v = e.state.V;
  int n = static_cast<int>(v.rows() / 2);
  if (e.mu.size() != v.rows() || std::abs(e.mu.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("generator direction must be a unit 2N-vector");
  }
  if (e.shots < 100) throw InvalidArgument("at least 100 shots per trial required");
  if (e.trials < 10) throw InvalidArgument("at least 10 trials required");
  williamson(v);  // physicality
  RMatrix om = omega(n);
  RVector shift = om.transpose() * e.mu;
  RVector nu = e.measured.size() == 0 ? shift : e.measured;
  if (nu.size() != v.rows() || std::abs(nu.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("measured direction must be a unit 2N-vector");
  }
  double gain = nu.dot(shift);
  double var = nu.dot(v * nu) / 2.0;
  if (std::abs(gain) < 1e-9) throw InvalidArgument("measured quadrature is insensitive to the shift");
  if (!(var > 1e-15)) throw InvalidArgument("degenerate measured variance");
  double centre = nu.dot(e.state.d);
  double mean = centre - gain * e.theta;
  double sd = std::sqrt(var);

  std::vector<double> est(e.trials);
  for (int t = 0; t < e.trials; ++t) {
    Rng rng(e.seed, static_cast<std::uint64_t>(t));
    double sum = 0.0;
    for (long s = 0; s < e.shots; ++s) sum += mean + sd * rng.normal();
    est[t] = (centre - sum / e.shots) / gain;
  }
  double avg = 0.0;
  for (double x : est) avg += x;
  avg /= e.trials;
  double ss = 0.0;
  for (double x : est) ss += (x - avg) * (x - avg);
  double var_hat = ss / (e.trials - 1);

  double qfi = e.mu.dot(2.0 * om.transpose() * v.inverse() * om * e.mu);
  return {var_hat, avg, qfi, gain * gain / var, var_hat * e.shots * qfi};
}

}  // namespace ncvar
