#pragma once

#include <cmath>
#include <vector>

#include "qfi.hpp"
#include "states.hpp"

namespace ncvar {

inline constexpr double kLeakageFlag = 1e-8;
inline constexpr double kConvergenceTol = 1e-5;

struct LeakageReport {
  std::vector<int> cutoffs;
  double factory_leakage;                // exact-state weight lost to the truncation
  std::vector<double> top_population;    // per mode, top two Fock levels
  bool insufficient;
  int delta;
  double m_at_cutoff;
  double m_at_cutoff_plus_delta;
  double delta_m() const { return std::abs(m_at_cutoff - m_at_cutoff_plus_delta); }
  bool converged() const { return delta_m() <= kConvergenceTol; }
};

// Top-level populations and factory leakage at the spec's cutoffs, and the
// change of M when every cutoff grows by `delta`.
inline LeakageReport leakage_report(const StateSpec& spec, int delta = 8, bool with_m = true) {
  if (delta < 1) throw InvalidArgument("delta must be positive");
  BuiltState b = build_state_with_leakage(spec);
  LeakageReport r;
  r.cutoffs = spec.cutoffs;
  r.factory_leakage = b.leakage;
  r.top_population = top_level_population(b.state, 2);
  r.insufficient = b.leakage > kLeakageFlag;
  for (double p : r.top_population) r.insufficient = r.insufficient || p > kLeakageFlag;
  r.delta = delta;
  r.m_at_cutoff = r.m_at_cutoff_plus_delta = 0.0;
  if (with_m) {
    r.m_at_cutoff = metrological_power(b.state).value;
    r.m_at_cutoff_plus_delta = metrological_power(build_state_with_leakage(spec.enlarged(delta)).state).value;
  }
  return r;
}

}  // namespace ncvar
