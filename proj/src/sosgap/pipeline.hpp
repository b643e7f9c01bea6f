#pragma once

#include <optional>

#include "sosgap/certify.hpp"
#include "sosgap/sos.hpp"

namespace sosgap {

struct PipelineConfig {
  GroupFamily family{FamilyKind::SpecialLinear, 3};
  int radius = 2;
  TargetDescriptor target;
  SolverParams solver;
  // Iterations of the lambda-maximizing probe; the certified run then fixes
  // lambda at the probe value minus margin, rounded down to 6 decimals.
  std::uint64_t probe_iters = 5000;
  Rational margin{1, 200};
  // Skips the probe and certifies this lambda directly.
  std::optional<Rational> lambda;
  int bits = 48;
  std::uint64_t element_cap = kDefaultBallCap;
};

struct PipelineResult {
  std::optional<SosSolution> probe;
  SosProblem problem;
  SosSolution solution;
  Certificate certificate;
};

PipelineResult run_pipeline(const PipelineConfig& config);

// floor(x * 10^digits) / 10^digits
Rational round_down(double x, int digits);

}  // namespace sosgap
