#pragma once

#include <cstddef>
#include <vector>

#include "qoct/linalg.hpp"

namespace qoct {

/// Uniform grid t_j = t0 + j*dt, j = 0..n_steps, on [t0, tf].
class TimeGrid {
 public:
  /// Throws GridError unless tf > t0 and n_steps >= 1.
  TimeGrid(double t0, double tf, std::size_t n_steps);

  double t0() const { return t0_; }
  double tf() const { return tf_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t node_count() const { return n_steps_ + 1; }

  /// t_j; the last node is tf exactly.
  double node(std::size_t j) const;
  double midpoint(std::size_t step) const { return t0_ + (static_cast<double>(step) + 0.5) * dt_; }

  /// Index of the node equal to t within 1e-9*dt; throws DomainError otherwise.
  std::size_t node_index(double t) const;

  /// Composite trapezoid weights over the full grid.
  std::vector<double> trapezoid_weights() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double t0_;
  double tf_;
  std::size_t n_steps_;
  double dt_;
};

enum class Direction { Forward, Backward };

/// Node-sampled solution of one propagation problem.
template <class Node>
struct Trajectory {
  TimeGrid grid;
  Direction direction;
  std::vector<Node> nodes;

  const Node& at(std::size_t j) const { return nodes.at(j); }
  std::size_t size() const { return nodes.size(); }
};

using StateTrajectory = Trajectory<QuantumState>;
using CostateTrajectory = Trajectory<Vector>;
using ObservableTrajectory = Trajectory<Matrix>;

}  // namespace qoct
