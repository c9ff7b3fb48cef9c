#include "qoct/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qoct {

namespace {

// Relative distance to an integer below which a scaled time snaps to it.
constexpr double kSnap = 1e-12;

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= kSnap * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

ControlledSystem::ControlledSystem(Operator h_static, Operator coupling,
                                   QuantumState initial_state, double t0, double tf)
    : h_static_(std::move(h_static)),
      coupling_(std::move(coupling)),
      initial_state_(std::move(initial_state)),
      t0_(t0),
      tf_(tf) {
  if (!h_static_.is_hermitian()) throw HermiticityError("static Hamiltonian must be Hermitian");
  if (!coupling_.is_hermitian()) throw HermiticityError("coupling operator must be Hermitian");
  if (coupling_.dim() != h_static_.dim() || initial_state_.dim() != h_static_.dim()) {
    throw DimensionError("system operators and initial state must share one dimension");
  }
  if (!(tf_ > t0_)) throw DomainError("control window requires tf > t0");
}

ControlledSystem ControlledSystem::with_initial_state(QuantumState state) const {
  return ControlledSystem(h_static_, coupling_, std::move(state), t0_, tf_);
}

ControlParameterization::ControlParameterization(ControlKind kind, std::vector<double> params,
                                                 double t0, double tf)
    : kind_(kind), params_(std::move(params)), t0_(t0), tf_(tf) {
  if (!(tf_ > t0_)) throw DomainError("control window requires tf > t0");
  if (params_.empty()) throw IndexError("control parameterization needs at least one parameter");
  if (kind_ == ControlKind::RawGrid && params_.size() < 2) {
    throw IndexError("raw-grid control needs at least two samples");
  }
  for (double u : params_) {
    if (!std::isfinite(u)) throw DomainError("control parameters must be finite");
  }
}

ControlParameterization ControlParameterization::piecewise_constant(std::vector<double> params,
                                                                    double t0, double tf) {
  return {ControlKind::PiecewiseConstant, std::move(params), t0, tf};
}

ControlParameterization ControlParameterization::sine_basis(std::vector<double> params, double t0,
                                                            double tf) {
  return {ControlKind::SineBasis, std::move(params), t0, tf};
}

ControlParameterization ControlParameterization::raw_grid(std::vector<double> params, double t0,
                                                          double tf) {
  return {ControlKind::RawGrid, std::move(params), t0, tf};
}

ControlParameterization ControlParameterization::with_params(std::vector<double> params) const {
  if (params.size() != params_.size()) {
    throw IndexError("expected " + std::to_string(params_.size()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  return {kind_, std::move(params), t0_, tf_};
}

void ControlParameterization::check_time(double t) const {
  if (!(t >= t0_ && t <= tf_)) {
    throw DomainError("time " + std::to_string(t) + " outside control window [" +
                      std::to_string(t0_) + ", " + std::to_string(tf_) + "]");
  }
}

std::vector<double> ControlParameterization::basis_values(double t) const {
  check_time(t);
  const std::size_t m = params_.size();
  const double x = (t - t0_) / (tf_ - t0_);
  std::vector<double> b(m, 0.0);
  switch (kind_) {
    case ControlKind::PiecewiseConstant: {
      const double pos = snap(x * static_cast<double>(m));
      std::size_t bin = static_cast<std::size_t>(std::floor(pos));
      if (bin >= m) bin = m - 1;
      b[bin] = 1.0;
      break;
    }
    case ControlKind::SineBasis: {
      if (t == t0_ || t == tf_) break;
      for (std::size_t k = 0; k < m; ++k) {
        b[k] = std::sin(static_cast<double>(k + 1) * std::numbers::pi * x);
      }
      break;
    }
    case ControlKind::RawGrid: {
      const double pos = snap(x * static_cast<double>(m - 1));
      std::size_t left = static_cast<std::size_t>(std::floor(pos));
      if (left >= m - 1) left = m - 2;
      const double frac = pos - static_cast<double>(left);
      b[left] = 1.0 - frac;
      b[left + 1] = frac;
      break;
    }
  }
  return b;
}

double ControlParameterization::epsilon(double t) const {
  const std::vector<double> b = basis_values(t);
  double value = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) value += params_[k] * b[k];
  return value;
}

double ControlParameterization::derivative(std::size_t k, double t) const {
  if (k >= params_.size()) {
    throw IndexError("parameter index " + std::to_string(k) + " out of range for " +
                     std::to_string(params_.size()) + " parameters");
  }
  return basis_values(t)[k];
}

double epsilon(const ControlParameterization& ctrl, double t) { return ctrl.epsilon(t); }

double depsilon_du(const ControlParameterization& ctrl, std::size_t k, double t) {
  return ctrl.derivative(k, t);
}

Operator hamiltonian_at(const ControlledSystem& sys, const ControlParameterization& ctrl,
                        double t) {
  const double field = ctrl.epsilon(t);
  if (field == 0.0) return sys.h_static();
  return Operator::hermitian(sys.h_static().matrix() + field * sys.coupling().matrix());
}

namespace {

// One-sided sample times inside a step: node times for continuous bases,
// the midpoint for piecewise-constant ones.
std::pair<double, double> step_sample_times(const ControlParameterization& ctrl,
                                            const TimeGrid& grid, std::size_t step) {
  if (ctrl.is_continuous()) return {grid.node(step), grid.node(step + 1)};
  const double mid = grid.midpoint(step);
  return {mid, mid};
}

}  // namespace

StepEnds epsilon_step_ends(const ControlParameterization& ctrl, const TimeGrid& grid,
                           std::size_t step) {
  const auto [a, b] = step_sample_times(ctrl, grid, step);
  return {ctrl.epsilon(a), ctrl.epsilon(b)};
}

Eigen::MatrixXd parameter_node_weights(const ControlParameterization& ctrl,
                                       const TimeGrid& grid) {
  const auto m = static_cast<Eigen::Index>(ctrl.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(grid.node_count()));
  const double half = 0.5 * grid.dt();
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const auto [a, b] = step_sample_times(ctrl, grid, j);
    const std::vector<double> start = ctrl.basis_values(a);
    const std::vector<double> end = ctrl.basis_values(b);
    const auto left = static_cast<Eigen::Index>(j);
    for (Eigen::Index k = 0; k < m; ++k) {
      w(k, left) += half * start[static_cast<std::size_t>(k)];
      w(k, left + 1) += half * end[static_cast<std::size_t>(k)];
    }
  }
  return w;
}

double fluence(const ControlParameterization& ctrl, const TimeGrid& grid) {
  double total = 0.0;
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const StepEnds e = epsilon_step_ends(ctrl, grid, j);
    total += 0.5 * grid.dt() * (e.start * e.start + e.end * e.end);
  }
  return total;
}

std::vector<double> fluence_gradient(const ControlParameterization& ctrl, const TimeGrid& grid) {
  std::vector<double> grad(ctrl.size(), 0.0);
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const auto [a, b] = step_sample_times(ctrl, grid, j);
    const std::vector<double> start = ctrl.basis_values(a);
    const std::vector<double> end = ctrl.basis_values(b);
    const StepEnds e = epsilon_step_ends(ctrl, grid, j);
    for (std::size_t k = 0; k < ctrl.size(); ++k) {
      grad[k] += grid.dt() * (e.start * start[k] + e.end * end[k]);
    }
  }
  return grad;
}

Target::Target(TargetKind kind, Operator observable, std::vector<double> weights, double alpha)
    : kind_(kind),
      observable_(std::move(observable)),
      weights_(std::move(weights)),
      penalty_alpha_(alpha) {
  if (!observable_.is_hermitian()) throw HermiticityError("target observable must be Hermitian");
  if (!(penalty_alpha_ >= 0.0) || !std::isfinite(penalty_alpha_)) {
    throw DomainError("penalty_alpha must be a finite non-negative number");
  }
  for (double g : weights_) {
    if (!std::isfinite(g)) throw DomainError("target weights must be finite");
  }
}

Target Target::final_time(Operator observable) {
  return {TargetKind::FinalTime, std::move(observable), {}, 0.0};
}

Target Target::time_dependent(Operator observable, std::vector<double> weights) {
  if (weights.empty()) throw GridError("time-dependent target needs weight samples");
  return {TargetKind::TimeDependent, std::move(observable), std::move(weights), 0.0};
}

Target Target::composite(Operator observable, double penalty_alpha,
                         std::optional<std::vector<double>> weights) {
  std::vector<double> w = weights ? std::move(*weights) : std::vector<double>{};
  if (weights && w.empty()) throw GridError("composite target weights must not be empty");
  return {TargetKind::Composite, std::move(observable), std::move(w), penalty_alpha};
}

void Target::check_grid(const TimeGrid& grid) const {
  if (is_time_dependent() && weights_.size() != grid.node_count()) {
    throw GridError("target has " + std::to_string(weights_.size()) +
                    " weight samples but the grid has " + std::to_string(grid.node_count()) +
                    " nodes");
  }
}

double merit(const ControlledSystem& sys, const ControlParameterization& ctrl,
             const Target& target, const StateTrajectory& trajectory) {
  const TimeGrid& grid = trajectory.grid;
  if (trajectory.size() != grid.node_count()) {
    throw GridError("trajectory has " + std::to_string(trajectory.size()) +
                    " nodes, grid expects " + std::to_string(grid.node_count()));
  }
  if (target.observable().dim() != sys.dim()) {
    throw DimensionError("target observable dimension does not match the system");
  }
  target.check_grid(grid);

  double value = 0.0;
  if (target.is_time_dependent()) {
    const std::vector<double> w = grid.trapezoid_weights();
    for (std::size_t j = 0; j < grid.node_count(); ++j) {
      const double g = target.weights()[j];
      if (g == 0.0) continue;
      value += w[j] * g * expectation(trajectory.at(j), target.observable()).real();
    }
  } else {
    value = expectation(trajectory.nodes.back(), target.observable()).real();
  }
  if (target.kind() == TargetKind::Composite && target.penalty_alpha() != 0.0) {
    value -= target.penalty_alpha() * fluence(ctrl, grid);
  }
  return value;
}

}  // namespace qoct
