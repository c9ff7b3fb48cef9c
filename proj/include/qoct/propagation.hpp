#pragma once

#include <span>
#include <vector>

#include "qoct/linalg.hpp"
#include "qoct/model.hpp"
#include "qoct/trajectory.hpp"

namespace qoct {

/// Exponential-midpoint step propagators U_j = exp(-i H(t_j + dt/2) dt).
///
/// Built once per control evaluation and shared by every forward, backward
/// and Heisenberg propagation.
struct StepPropagatorCache {
  TimeGrid grid;
  std::vector<Matrix> unitaries;

  std::size_t steps() const { return unitaries.size(); }
  Eigen::Index dim() const { return unitaries.front().rows(); }
};

StepPropagatorCache build_step_propagators(const ControlledSystem& sys,
                                           const ControlParameterization& ctrl,
                                           const TimeGrid& grid);

/// Same, from explicit field values at the step midpoints (one per step).
StepPropagatorCache build_step_propagators(const ControlledSystem& sys,
                                           std::span<const double> midpoint_fields,
                                           const TimeGrid& grid);

/// U(tf, t0) = U_{n-1} ... U_0.
Matrix full_propagator(const StepPropagatorCache& cache);

/// U(t_j, t0) for every node j.
std::vector<Matrix> cumulative_propagators(const StepPropagatorCache& cache);

StateTrajectory propagate_forward(const ControlledSystem& sys, const StepPropagatorCache& cache);
StateTrajectory propagate_forward(const ControlledSystem& sys,
                                  const ControlParameterization& ctrl, const TimeGrid& grid);

/// psi_{j+1} = U_j psi_j for an arbitrary (unnormalized) starting vector.
CostateTrajectory propagate_vector_forward(const StepPropagatorCache& cache, const Vector& start);

/// chi_j = U_j^dagger chi_{j+1} from the terminal vector at tf.
CostateTrajectory propagate_costate_backward(const StepPropagatorCache& cache,
                                             const Vector& terminal);
CostateTrajectory propagate_costate_backward(const ControlledSystem& sys,
                                             const ControlParameterization& ctrl,
                                             const TimeGrid& grid, const Vector& terminal);

/// Costate of a time-dependent target: chi(tf) = 0 and
/// chi(tau) = integral_tau^tf g(t) U(t,tau)^dagger A psi(t) dt, realized as
/// chi_j = U_j^dagger (chi_{j+1} + dt/2 g_{j+1} A psi_{j+1}) + dt/2 g_j A psi_j.
///
/// The forward trajectory must be pure and on the cache's grid.
CostateTrajectory propagate_costate_backward_inhomogeneous(const StepPropagatorCache& cache,
                                                           const StateTrajectory& forward,
                                                           const Operator& a,
                                                           std::span<const double> g);
CostateTrajectory propagate_costate_backward_inhomogeneous(const ControlledSystem& sys,
                                                           const ControlParameterization& ctrl,
                                                           const TimeGrid& grid,
                                                           const StateTrajectory& forward,
                                                           const Operator& a,
                                                           std::span<const double> g);

/// A_j = U_j^dagger A_{j+1} U_j from A(tf) = A.
ObservableTrajectory propagate_observable_backward(const StepPropagatorCache& cache,
                                                   const Operator& a);
ObservableTrajectory propagate_observable_backward(const ControlledSystem& sys,
                                                   const ControlParameterization& ctrl,
                                                   const TimeGrid& grid, const Operator& a);

/// Density-matrix analogue of the inhomogeneous costate:
/// B(tau) = integral_tau^tf g(t) U(t,tau)^dagger A U(t,tau) dt, B(tf) = 0.
ObservableTrajectory propagate_observable_backward_inhomogeneous(const StepPropagatorCache& cache,
                                                                 const Operator& a,
                                                                 std::span<const double> g);

}  // namespace qoct
