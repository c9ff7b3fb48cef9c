#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qoct/linalg.hpp"
#include "qoct/trajectory.hpp"

namespace qoct {

/// H(t) = h_static + epsilon(t) * coupling, driven from initial_state over [t0, tf].
class ControlledSystem {
 public:
  /// Throws HermiticityError, DimensionError or DomainError on invalid input.
  ControlledSystem(Operator h_static, Operator coupling, QuantumState initial_state, double t0,
                   double tf);

  const Operator& h_static() const { return h_static_; }
  const Operator& coupling() const { return coupling_; }
  const QuantumState& initial_state() const { return initial_state_; }
  double t0() const { return t0_; }
  double tf() const { return tf_; }
  Eigen::Index dim() const { return h_static_.dim(); }

  /// Same system with a different initial state.
  ControlledSystem with_initial_state(QuantumState state) const;

 private:
  Operator h_static_;
  Operator coupling_;
  QuantumState initial_state_;
  double t0_;
  double tf_;
};

enum class ControlKind { PiecewiseConstant, SineBasis, RawGrid };

/// Linear control field epsilon[u](t) = sum_k u_k * b_k(t).
///
/// PiecewiseConstant: b_k is the indicator of bin k (right-open, last bin
/// closed). SineBasis: b_k(t) = sin((k+1) pi (t - t0)/(tf - t0)), so index 0
/// is the first mode. RawGrid: b_k is the hat function of the k-th of M
/// equally spaced samples on [t0, tf].
class ControlParameterization {
 public:
  static ControlParameterization piecewise_constant(std::vector<double> params, double t0,
                                                    double tf);
  static ControlParameterization sine_basis(std::vector<double> params, double t0, double tf);
  /// Requires at least two samples.
  static ControlParameterization raw_grid(std::vector<double> params, double t0, double tf);

  ControlKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  double t0() const { return t0_; }
  double tf() const { return tf_; }

  /// Copy with new parameter values; the count must match.
  ControlParameterization with_params(std::vector<double> params) const;

  double epsilon(double t) const;
  /// d epsilon / d u_k at t.
  double derivative(std::size_t k, double t) const;
  /// b_k(t) for every k at once.
  std::vector<double> basis_values(double t) const;

  /// False only for PiecewiseConstant, whose basis jumps at bin edges.
  bool is_continuous() const { return kind_ != ControlKind::PiecewiseConstant; }

 private:
  ControlParameterization(ControlKind kind, std::vector<double> params, double t0, double tf);
  void check_time(double t) const;

  ControlKind kind_;
  std::vector<double> params_;
  double t0_;
  double tf_;
};

double epsilon(const ControlParameterization& ctrl, double t);
double depsilon_du(const ControlParameterization& ctrl, std::size_t k, double t);

/// h_static + epsilon(t) * coupling.
Operator hamiltonian_at(const ControlledSystem& sys, const ControlParameterization& ctrl, double t);

/// Values of f just after t_j and just before t_{j+1} inside step j.
///
/// Continuous kinds return the node values; PiecewiseConstant returns the
/// step-midpoint value at both ends, so a bin edge that falls on a node is
/// integrated exactly.
struct StepEnds {
  double start;
  double end;
};
StepEnds epsilon_step_ends(const ControlParameterization& ctrl, const TimeGrid& grid,
                           std::size_t step);

/// W(k, j) such that sum_j W(k, j) * K(t_j) is the composite trapezoid rule
/// for the integral of b_k(t) K(t) over [t0, tf], built from one-sided basis
/// values in each step.
Eigen::MatrixXd parameter_node_weights(const ControlParameterization& ctrl, const TimeGrid& grid);

/// Trapezoid quadrature of epsilon(t)^2 over the grid (one-sided step ends).
double fluence(const ControlParameterization& ctrl, const TimeGrid& grid);
/// d fluence / d u_k.
std::vector<double> fluence_gradient(const ControlParameterization& ctrl, const TimeGrid& grid);

enum class TargetKind { FinalTime, TimeDependent, Composite };

/// Merit functional G[u].
///
/// FinalTime: <A>(tf). TimeDependent: integral of g(t) <A>(t). Composite:
/// J1 - alpha * integral of epsilon^2, where J1 is the time-dependent form
/// when weights are present and the final-time form otherwise.
class Target {
 public:
  static Target final_time(Operator observable);
  static Target time_dependent(Operator observable, std::vector<double> weights);
  static Target composite(Operator observable, double penalty_alpha,
                          std::optional<std::vector<double>> weights = std::nullopt);

  TargetKind kind() const { return kind_; }
  const Operator& observable() const { return observable_; }
  /// Empty unless the objective integrates over the trajectory.
  const std::vector<double>& weights() const { return weights_; }
  double penalty_alpha() const { return penalty_alpha_; }

  /// True when J1 integrates <A>(t) over the grid.
  bool is_time_dependent() const { return !weights_.empty(); }

  /// Throws GridError unless weights (if any) match the grid node count.
  void check_grid(const TimeGrid& grid) const;

 private:
  Target(TargetKind kind, Operator observable, std::vector<double> weights, double alpha);

  TargetKind kind_;
  Operator observable_;
  std::vector<double> weights_;
  double penalty_alpha_ = 0.0;
};

/// G[u] from a forward trajectory.
double merit(const ControlledSystem& sys, const ControlParameterization& ctrl,
             const Target& target, const StateTrajectory& trajectory);

}  // namespace qoct
