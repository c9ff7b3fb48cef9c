#include "qoct/propagation.hpp"

#include <cmath>
#include <string>

namespace qoct {

TimeGrid::TimeGrid(double t0, double tf, std::size_t n_steps)
    : t0_(t0), tf_(tf), n_steps_(n_steps), dt_(0.0) {
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0)) {
    throw GridError("time grid requires finite tf > t0");
  }
  if (n_steps == 0) throw GridError("time grid requires at least one step");
  dt_ = (tf - t0) / static_cast<double>(n_steps);
}

double TimeGrid::node(std::size_t j) const {
  if (j > n_steps_) throw IndexError("node index " + std::to_string(j) + " beyond grid");
  if (j == n_steps_) return tf_;
  return t0_ + static_cast<double>(j) * dt_;
}

std::size_t TimeGrid::node_index(double t) const {
  const double pos = (t - t0_) / dt_;
  const double r = std::round(pos);
  if (!(r >= 0.0 && r <= static_cast<double>(n_steps_)) || std::abs(pos - r) > 1e-9) {
    throw DomainError("time " + std::to_string(t) + " is not a grid node");
  }
  return static_cast<std::size_t>(r);
}

std::vector<double> TimeGrid::trapezoid_weights() const {
  std::vector<double> w(node_count(), dt_);
  w.front() = 0.5 * dt_;
  w.back() = 0.5 * dt_;
  return w;
}

namespace {

void require_grid_inside(const ControlledSystem& sys, const TimeGrid& grid) {
  if (grid.t0() < sys.t0() || grid.tf() > sys.tf()) {
    throw GridError("time grid extends beyond the system's control window");
  }
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (!(a == b)) throw GridError("trajectory and propagator cache use different time grids");
}

void require_samples(std::span<const double> g, const TimeGrid& grid) {
  if (g.size() != grid.node_count()) {
    throw GridError("expected " + std::to_string(grid.node_count()) + " weight samples, got " +
                    std::to_string(g.size()));
  }
}

}  // namespace

StepPropagatorCache build_step_propagators(const ControlledSystem& sys,
                                           const ControlParameterization& ctrl,
                                           const TimeGrid& grid) {
  std::vector<double> fields(grid.n_steps());
  for (std::size_t j = 0; j < grid.n_steps(); ++j) fields[j] = ctrl.epsilon(grid.midpoint(j));
  return build_step_propagators(sys, fields, grid);
}

StepPropagatorCache build_step_propagators(const ControlledSystem& sys,
                                           std::span<const double> midpoint_fields,
                                           const TimeGrid& grid) {
  require_grid_inside(sys, grid);
  if (midpoint_fields.size() != grid.n_steps()) {
    throw GridError("expected one field value per step");
  }
  const Matrix& h0 = sys.h_static().matrix();
  const Matrix& v = sys.coupling().matrix();
  const Complex scale = -kI * grid.dt();

  StepPropagatorCache cache{grid, {}};
  cache.unitaries.reserve(grid.n_steps());
  for (double field : midpoint_fields) {
    if (!std::isfinite(field)) throw DomainError("control field is not finite");
    cache.unitaries.push_back(expm_hermitian(Matrix(h0 + field * v), scale));
  }
  return cache;
}

Matrix full_propagator(const StepPropagatorCache& cache) {
  Matrix u = Matrix::Identity(cache.dim(), cache.dim());
  for (const Matrix& step : cache.unitaries) u = step * u;
  return u;
}

std::vector<Matrix> cumulative_propagators(const StepPropagatorCache& cache) {
  std::vector<Matrix> out;
  out.reserve(cache.steps() + 1);
  out.push_back(Matrix::Identity(cache.dim(), cache.dim()));
  for (const Matrix& step : cache.unitaries) out.push_back(step * out.back());
  return out;
}

StateTrajectory propagate_forward(const ControlledSystem& sys, const StepPropagatorCache& cache) {
  require_grid_inside(sys, cache.grid);
  StateTrajectory traj{cache.grid, Direction::Forward, {}};
  traj.nodes.reserve(cache.steps() + 1);
  traj.nodes.push_back(sys.initial_state());
  if (sys.initial_state().is_pure()) {
    Vector psi = sys.initial_state().vector();
    for (const Matrix& u : cache.unitaries) {
      psi = u * psi;
      traj.nodes.push_back(QuantumState::pure_unchecked(psi));
    }
  } else {
    Matrix rho = sys.initial_state().matrix();
    for (const Matrix& u : cache.unitaries) {
      rho = u * rho * u.adjoint();
      traj.nodes.push_back(QuantumState::density_unchecked(rho));
    }
  }
  return traj;
}

StateTrajectory propagate_forward(const ControlledSystem& sys,
                                  const ControlParameterization& ctrl, const TimeGrid& grid) {
  return propagate_forward(sys, build_step_propagators(sys, ctrl, grid));
}

CostateTrajectory propagate_vector_forward(const StepPropagatorCache& cache, const Vector& start) {
  if (start.size() != cache.dim()) throw DimensionError("vector dimension mismatch");
  CostateTrajectory traj{cache.grid, Direction::Forward, {}};
  traj.nodes.reserve(cache.steps() + 1);
  traj.nodes.push_back(start);
  for (const Matrix& u : cache.unitaries) traj.nodes.push_back(u * traj.nodes.back());
  return traj;
}

CostateTrajectory propagate_costate_backward(const StepPropagatorCache& cache,
                                             const Vector& terminal) {
  if (terminal.size() != cache.dim()) throw DimensionError("terminal costate dimension mismatch");
  const std::size_t n = cache.steps();
  CostateTrajectory traj{cache.grid, Direction::Backward, std::vector<Vector>(n + 1)};
  traj.nodes[n] = terminal;
  for (std::size_t j = n; j-- > 0;) {
    traj.nodes[j] = cache.unitaries[j].adjoint() * traj.nodes[j + 1];
  }
  return traj;
}

CostateTrajectory propagate_costate_backward(const ControlledSystem& sys,
                                             const ControlParameterization& ctrl,
                                             const TimeGrid& grid, const Vector& terminal) {
  return propagate_costate_backward(build_step_propagators(sys, ctrl, grid), terminal);
}

CostateTrajectory propagate_costate_backward_inhomogeneous(const StepPropagatorCache& cache,
                                                           const StateTrajectory& forward,
                                                           const Operator& a,
                                                           std::span<const double> g) {
  require_same_grid(cache.grid, forward.grid);
  require_samples(g, cache.grid);
  if (forward.size() != cache.grid.node_count()) {
    throw GridError("forward trajectory does not cover the grid");
  }
  if (a.dim() != cache.dim()) throw DimensionError("observable dimension mismatch");

  const std::size_t n = cache.steps();
  const double half = 0.5 * cache.grid.dt();
  auto source = [&](std::size_t j) -> Vector {
    return (half * g[j]) * (a.matrix() * forward.at(j).vector());
  };

  CostateTrajectory traj{cache.grid, Direction::Backward, std::vector<Vector>(n + 1)};
  traj.nodes[n] = Vector::Zero(cache.dim());
  for (std::size_t j = n; j-- > 0;) {
    traj.nodes[j] = cache.unitaries[j].adjoint() * (traj.nodes[j + 1] + source(j + 1)) + source(j);
  }
  return traj;
}

CostateTrajectory propagate_costate_backward_inhomogeneous(const ControlledSystem& sys,
                                                           const ControlParameterization& ctrl,
                                                           const TimeGrid& grid,
                                                           const StateTrajectory& forward,
                                                           const Operator& a,
                                                           std::span<const double> g) {
  return propagate_costate_backward_inhomogeneous(build_step_propagators(sys, ctrl, grid),
                                                  forward, a, g);
}

ObservableTrajectory propagate_observable_backward(const StepPropagatorCache& cache,
                                                   const Operator& a) {
  if (!a.is_hermitian()) throw HermiticityError("backward observable must be Hermitian");
  if (a.dim() != cache.dim()) throw DimensionError("observable dimension mismatch");
  const std::size_t n = cache.steps();
  ObservableTrajectory traj{cache.grid, Direction::Backward, std::vector<Matrix>(n + 1)};
  traj.nodes[n] = a.matrix();
  for (std::size_t j = n; j-- > 0;) {
    const Matrix& u = cache.unitaries[j];
    traj.nodes[j] = u.adjoint() * traj.nodes[j + 1] * u;
  }
  return traj;
}

ObservableTrajectory propagate_observable_backward(const ControlledSystem& sys,
                                                   const ControlParameterization& ctrl,
                                                   const TimeGrid& grid, const Operator& a) {
  return propagate_observable_backward(build_step_propagators(sys, ctrl, grid), a);
}

ObservableTrajectory propagate_observable_backward_inhomogeneous(const StepPropagatorCache& cache,
                                                                 const Operator& a,
                                                                 std::span<const double> g) {
  if (!a.is_hermitian()) throw HermiticityError("backward observable must be Hermitian");
  if (a.dim() != cache.dim()) throw DimensionError("observable dimension mismatch");
  require_samples(g, cache.grid);
  const std::size_t n = cache.steps();
  const double half = 0.5 * cache.grid.dt();
  ObservableTrajectory traj{cache.grid, Direction::Backward, std::vector<Matrix>(n + 1)};
  traj.nodes[n] = Matrix::Zero(cache.dim(), cache.dim());
  for (std::size_t j = n; j-- > 0;) {
    const Matrix& u = cache.unitaries[j];
    Matrix ahead = traj.nodes[j + 1] + (half * g[j + 1]) * a.matrix();
    traj.nodes[j] = u.adjoint() * ahead * u + (half * g[j]) * a.matrix();
  }
  return traj;
}

}  // namespace qoct
