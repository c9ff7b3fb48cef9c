#pragma once

#include <cstdint>
#include <vector>

#include "qoct/gradients.hpp"
#include "qoct/model.hpp"

namespace qoct {

struct OptimizationConfig {
  GradientRoute route = GradientRoute::Adjoint;
  int max_iterations = 200;
  double tol_gradient = 1e-8;   // stop when |grad|_inf falls below
  double tol_merit = 1e-12;     // stop when an accepted step gains less
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  int lbfgs_memory = 8;         // 0 = plain gradient ascent
  double fd_step = kDefaultFdStep;
  std::uint64_t seed = 0;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

enum class TerminationStatus { GradientConverged, MeritConverged, MaxIterations, LineSearchFailed };

const char* status_name(TerminationStatus status);

struct IterationRecord {
  int iteration;
  double merit;
  double gradient_inf_norm;
  double step_size;  // 0 for the starting point
  std::vector<double> params;
};

struct OptimizationTrace {
  std::vector<IterationRecord> records;
  TerminationStatus status = TerminationStatus::MaxIterations;
  std::uint64_t seed = 0;
};

struct OptimizationResult {
  ControlParameterization control;
  OptimizationTrace trace;
};

inline constexpr int kMaxBacktracks = 40;

/// Maximizes G[u] by gradient ascent with Armijo backtracking, accelerated
/// by two-loop L-BFGS when lbfgs_memory > 0.
OptimizationResult maximize(const ControlledSystem& sys,
                            const ControlParameterization& ctrl_initial, const TimeGrid& grid,
                            const Target& target, const OptimizationConfig& cfg);

/// Seeded uniform noise in [-0.01, 0.01], used when no initial guess is given.
std::vector<double> initial_guess(std::size_t count, std::uint64_t seed);

}  // namespace qoct
