#include "qoct/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "qoct/routes.hpp"

namespace qoct {

void OptimizationConfig::validate() const {
  if (max_iterations < 0) throw DomainError("optimize.max_iterations must be >= 0");
  if (!(tol_gradient > 0.0)) throw DomainError("optimize.tol_gradient must be > 0");
  if (!(tol_merit > 0.0)) throw DomainError("optimize.tol_merit must be > 0");
  if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
    throw DomainError("optimize.initial_step must be > 0");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw DomainError("optimize.backtrack_factor must lie in (0, 1)");
  }
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw DomainError("optimize.armijo_c must lie in (0, 1)");
  if (lbfgs_memory < 0) throw DomainError("optimize.lbfgs_memory must be >= 0");
  if (!(fd_step > 0.0)) throw DomainError("optimize.fd_step must be > 0");
}

const char* status_name(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::GradientConverged:
      return "GradientConverged";
    case TerminationStatus::MeritConverged:
      return "MeritConverged";
    case TerminationStatus::MaxIterations:
      return "MaxIterations";
    case TerminationStatus::LineSearchFailed:
      return "LineSearchFailed";
  }
  return "Unknown";
}

std::vector<double> initial_guess(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<double> u(count);
  for (double& x : u) x = noise(rng);
  return u;
}

namespace {

using Vec = Eigen::VectorXd;

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

// Curvature pairs of the minimization problem f = -G.
struct CurvaturePair {
  Vec s;
  Vec y;
  double rho;
};

// Two-loop recursion: returns an approximation of H * q for the inverse
// Hessian of f, with q = grad f.
Vec two_loop(const std::deque<CurvaturePair>& memory, Vec q) {
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  const CurvaturePair& last = memory.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q += (alpha[i] - beta) * memory[i].s;
  }
  return q;
}

}  // namespace

OptimizationResult maximize(const ControlledSystem& sys,
                            const ControlParameterization& ctrl_initial, const TimeGrid& grid,
                            const Target& target, const OptimizationConfig& cfg) {
  cfg.validate();
  auto gradient_at = [&](const ControlParameterization& c) {
    return evaluate_gradient(cfg.route, sys, c, grid, target, cfg.fd_step);
  };
  auto merit_at = [&](const Vec& u) {
    return evaluate_merit(sys, ctrl_initial.with_params(to_std(u)), grid, target);
  };

  OptimizationTrace trace;
  trace.seed = cfg.seed;
  ControlParameterization ctrl = ctrl_initial;
  GradientResult current = gradient_at(ctrl);
  Vec u = to_vec(ctrl.params());
  Vec g = to_vec(current.values);
  double merit_value = current.merit_value;
  trace.records.push_back({0, merit_value, g.lpNorm<Eigen::Infinity>(), 0.0, ctrl.params()});

  std::deque<CurvaturePair> memory;
  for (int iteration = 1;; ++iteration) {
    if (g.lpNorm<Eigen::Infinity>() <= cfg.tol_gradient) {
      trace.status = TerminationStatus::GradientConverged;
      break;
    }
    if (iteration > cfg.max_iterations) {
      trace.status = TerminationStatus::MaxIterations;
      break;
    }

    // Ascent direction for G is the descent direction -H grad(f) = H g.
    Vec direction = memory.empty() ? g : two_loop(memory, g);
    double slope = g.dot(direction);
    double step = memory.empty() ? cfg.initial_step : 1.0;
    if (!(slope > 0.0) || !direction.allFinite()) {
      memory.clear();
      direction = g;
      slope = g.squaredNorm();
      step = cfg.initial_step;
    }

    bool accepted = false;
    Vec trial_u;
    double trial_merit = 0.0;
    for (int backtrack = 0; backtrack <= kMaxBacktracks; ++backtrack) {
      trial_u = u + step * direction;
      trial_merit = merit_at(trial_u);
      if (std::isfinite(trial_merit) && trial_merit >= merit_value + cfg.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack_factor;
    }
    if (!accepted) {
      trace.status = TerminationStatus::LineSearchFailed;
      break;
    }

    ctrl = ctrl_initial.with_params(to_std(trial_u));
    current = gradient_at(ctrl);
    const Vec g_new = to_vec(current.values);
    const double gain = current.merit_value - merit_value;

    const Vec s = trial_u - u;
    const Vec y = g - g_new;  // grad f_new - grad f_old with f = -G
    const double sy = s.dot(y);
    if (sy > 0.0) {
      if (cfg.lbfgs_memory > 0) {
        memory.push_back({s, y, 1.0 / sy});
        if (memory.size() > static_cast<std::size_t>(cfg.lbfgs_memory)) memory.pop_front();
      }
    } else {
      memory.clear();
    }

    u = trial_u;
    g = g_new;
    merit_value = current.merit_value;
    trace.records.push_back(
        {iteration, merit_value, g.lpNorm<Eigen::Infinity>(), step, ctrl.params()});

    if (gain < cfg.tol_merit) {
      trace.status = g.lpNorm<Eigen::Infinity>() <= cfg.tol_gradient
                         ? TerminationStatus::GradientConverged
                         : TerminationStatus::MeritConverged;
      break;
    }
  }
  return {std::move(ctrl), std::move(trace)};
}

}  // namespace qoct
