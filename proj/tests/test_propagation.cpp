#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qoct/propagation.hpp"
#include "test_support.hpp"

using namespace qoct;
using namespace qoct::testing;

namespace {

ControlledSystem tls(const QuantumState& psi0, double tf) {
  return ControlledSystem(Operator::hermitian(sigma_z()), Operator::hermitian(sigma_x()), psi0,
                          0.0, tf);
}

/// Midpoint steps with Pade exponentials, the reference for the library steps.
std::vector<Matrix> pade_steps(const ControlledSystem& sys, const ControlParameterization& ctrl,
                               const TimeGrid& grid) {
  std::vector<Matrix> out;
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const double e = ctrl.epsilon(grid.midpoint(j));
    out.push_back(pade_step(sys.h_static().matrix() + e * sys.coupling().matrix(), grid.dt()));
  }
  return out;
}

Vector pade_final_state(const ControlledSystem& sys, const ControlParameterization& ctrl,
                        std::size_t n) {
  const TimeGrid grid(sys.t0(), sys.tf(), n);
  Vector psi = sys.initial_state().vector();
  for (const Matrix& u : pade_steps(sys, ctrl, grid)) psi = u * psi;
  return psi;
}

}  // namespace

TEST_CASE("Rabi propagator matches the closed form") {
  const ControlledSystem sys(Operator::zero(2), Operator::hermitian(sigma_x()),
                             QuantumState::pure(basis(2, 0)), 0.0, 1.0);
  for (double u : {0.3, std::numbers::pi / 4, 2.0}) {
    const auto ctrl = ControlParameterization::piecewise_constant({u}, 0.0, 1.0);
    const TimeGrid grid(0.0, 1.0, 100);
    const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
    CHECK(max_abs(full_propagator(cache) - rabi_propagator(u)) <= 1e-12);

    const auto cumulative = cumulative_propagators(cache);
    for (std::size_t j = 0; j < grid.node_count(); j += 17) {
      CHECK(max_abs(cumulative[j] - rabi_propagator(u * grid.node(j))) <= 1e-12);
    }
    const StateTrajectory traj = propagate_forward(sys, cache);
    CHECK(std::abs(std::norm(traj.nodes.back().vector()(1)) - std::pow(std::sin(u), 2)) <= 1e-12);
  }
}

TEST_CASE("step unitaries agree with Pade exponentials") {
  std::mt19937_64 rng(8);
  for (Eigen::Index dim : {2, 4, 7}) {
    const ControlledSystem sys(Operator::hermitian(random_hermitian(dim, rng)),
                               Operator::hermitian(random_hermitian(dim, rng)),
                               QuantumState::pure(random_pure(dim, rng)), 0.0, 1.5);
    const auto ctrl = ControlParameterization::sine_basis(uniform_params(4, rng, -2, 2), 0.0, 1.5);
    const TimeGrid grid(0.0, 1.5, 50);
    const auto reference = pade_steps(sys, ctrl, grid);
    const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
    for (std::size_t j = 0; j < grid.n_steps(); ++j) {
      CHECK(max_abs(cache.unitaries[j] - reference[j]) <= 1e-13);
    }
  }
}

TEST_CASE("zero field gives the free evolution") {
  const double tf = 2.0;
  std::mt19937_64 rng(4);
  const auto sys = tls(QuantumState::pure(random_pure(2, rng)), tf);
  const auto ctrl = ControlParameterization::sine_basis({0.0, 0.0}, 0.0, tf);
  const Matrix u = full_propagator(build_step_propagators(sys, ctrl, TimeGrid(0.0, tf, 37)));
  CHECK(std::abs(u(0, 0) - std::exp(Complex(0, -tf))) <= 1e-13);
  CHECK(std::abs(u(1, 1) - std::exp(Complex(0, tf))) <= 1e-13);
  CHECK(std::abs(u(0, 1)) <= 1e-15);
}

TEST_CASE("unitarity, trace and positivity survive 1e4 steps") {
  std::mt19937_64 rng(31);
  const Eigen::Index dim = 4;
  const ControlledSystem pure(Operator::hermitian(random_hermitian(dim, rng, 2.0)),
                              Operator::hermitian(random_hermitian(dim, rng)),
                              QuantumState::pure(random_pure(dim, rng)), 0.0, 20.0);
  const ControlledSystem mixed =
      pure.with_initial_state(QuantumState::density(random_density(dim, rng)));
  const auto ctrl = ControlParameterization::sine_basis(uniform_params(6, rng, -1, 1), 0.0, 20.0);
  const TimeGrid grid(0.0, 20.0, 10000);
  const StepPropagatorCache cache = build_step_propagators(pure, ctrl, grid);

  const Matrix u = full_propagator(cache);
  CHECK(max_abs(u.adjoint() * u - Matrix::Identity(dim, dim)) <= 1e-10);

  const StateTrajectory psi = propagate_forward(pure, cache);
  double norm_drift = 0.0;
  for (const auto& s : psi.nodes) norm_drift = std::max(norm_drift, std::abs(s.vector().norm() - 1));
  CHECK(norm_drift <= 1e-10);

  const StateTrajectory rho = propagate_forward(mixed, cache);
  double trace_drift = 0.0;
  double min_eig = 1.0;
  for (std::size_t j = 0; j < rho.size(); j += 500) {
    trace_drift = std::max(trace_drift, std::abs(rho.at(j).matrix().trace() - 1.0));
    min_eig = std::min(min_eig, min_eigenvalue(rho.at(j).matrix()));
  }
  trace_drift = std::max(trace_drift, std::abs(rho.nodes.back().matrix().trace() - 1.0));
  CHECK(trace_drift <= 1e-10);
  CHECK(min_eig >= -1e-10);
}

TEST_CASE("pure and density propagation agree") {
  std::mt19937_64 rng(77);
  const Vector psi0 = random_pure(3, rng);
  const ControlledSystem pure(Operator::hermitian(random_hermitian(3, rng)),
                              Operator::hermitian(random_hermitian(3, rng)),
                              QuantumState::pure(psi0), 0.0, 1.0);
  const ControlledSystem mixed =
      pure.with_initial_state(QuantumState::density(psi0 * psi0.adjoint()));
  const auto ctrl = ControlParameterization::raw_grid(uniform_params(11, rng, -2, 2), 0.0, 1.0);
  const TimeGrid grid(0.0, 1.0, 200);
  const auto a = propagate_forward(pure, ctrl, grid);
  const auto b = propagate_forward(mixed, ctrl, grid);
  for (std::size_t j = 0; j < grid.node_count(); j += 20) {
    CHECK(max_abs(a.at(j).density_matrix() - b.at(j).matrix()) <= 1e-13);
  }
}

TEST_CASE("midpoint scheme converges at second order") {
  const auto sys = tls(QuantumState::pure(basis(2, 0)), 3.0);
  const auto ctrl = ControlParameterization::sine_basis({1.2, -0.7, 0.4}, 0.0, 3.0);
  const Vector reference = pade_final_state(sys, ctrl, 1 << 16);

  std::vector<double> errors;
  for (std::size_t n : {64, 128, 256}) {
    const auto traj = propagate_forward(sys, ctrl, TimeGrid(0.0, 3.0, n));
    errors.push_back((traj.nodes.back().vector() - reference).norm());
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("homogeneous backward propagation preserves overlaps") {
  std::mt19937_64 rng(5);
  const ControlledSystem sys(Operator::hermitian(random_hermitian(5, rng)),
                             Operator::hermitian(random_hermitian(5, rng)),
                             QuantumState::pure(random_pure(5, rng)), 0.0, 2.0);
  const auto ctrl = ControlParameterization::piecewise_constant(uniform_params(4, rng, -1, 1), 0.0,
                                                                2.0);
  const TimeGrid grid(0.0, 2.0, 400);
  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const StateTrajectory psi = propagate_forward(sys, cache);
  const Vector terminal = random_complex(5, 1, rng);
  const CostateTrajectory chi = propagate_costate_backward(cache, terminal);
  CHECK(max_abs(chi.nodes.back() - terminal) == 0.0);
  const Complex first = chi.at(0).dot(psi.at(0).vector());
  for (std::size_t j = 0; j < grid.node_count(); j += 40) {
    CHECK(std::abs(chi.at(j).dot(psi.at(j).vector()) - first) <= 1e-12);
  }

  // backward then forward returns the terminal vector
  const CostateTrajectory again = propagate_vector_forward(cache, chi.at(0));
  CHECK((again.nodes.back() - terminal).norm() <= 1e-12 * terminal.norm());

  // Tr{rho(t) A(t)} is conserved for the Heisenberg-backward observable
  const Matrix a = random_hermitian(5, rng);
  const ObservableTrajectory obs = propagate_observable_backward(cache, Operator::hermitian(a));
  const Complex last = trace_of_product(psi.nodes.back().density_matrix(), a);
  for (std::size_t j = 0; j < grid.node_count(); j += 40) {
    CHECK(std::abs(trace_of_product(psi.at(j).density_matrix(), obs.at(j)) - last) <= 1e-12);
  }
}

TEST_CASE("inhomogeneous costate equals the direct trapezoid integral") {
  std::mt19937_64 rng(12);
  const Eigen::Index dim = 3;
  const ControlledSystem sys(Operator::hermitian(random_hermitian(dim, rng)),
                             Operator::hermitian(random_hermitian(dim, rng)),
                             QuantumState::pure(random_pure(dim, rng)), 0.0, 1.0);
  const auto ctrl = ControlParameterization::sine_basis(uniform_params(3, rng, -1, 1), 0.0, 1.0);
  const TimeGrid grid(0.0, 1.0, 60);
  const Operator a = Operator::hermitian(random_hermitian(dim, rng));
  const std::vector<double> g = smooth_weights(grid);

  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const StateTrajectory psi = propagate_forward(sys, cache);
  const CostateTrajectory chi = propagate_costate_backward_inhomogeneous(cache, psi, a, g);
  const ObservableTrajectory big_b = propagate_observable_backward_inhomogeneous(cache, a, g);
  CHECK(chi.nodes.back().norm() == 0.0);

  const auto steps = pade_steps(sys, ctrl, grid);
  const double dt = grid.dt();
  const std::size_t n = grid.n_steps();
  for (std::size_t j = 0; j < n; j += 7) {
    Vector expected = Vector::Zero(dim);
    Matrix expected_b = Matrix::Zero(dim, dim);
    Matrix u = Matrix::Identity(dim, dim);  // U(t_i, t_j)
    for (std::size_t i = j; i <= n; ++i) {
      const double w = (i == j || i == n) ? 0.5 * dt : dt;
      expected += w * g[i] * (u.adjoint() * (a.matrix() * psi.at(i).vector()));
      expected_b += w * g[i] * (u.adjoint() * a.matrix() * u);
      if (i < n) u = steps[i] * u;
    }
    CHECK((chi.at(j) - expected).norm() <= 1e-12);
    CHECK(max_abs(big_b.at(j) - expected_b) <= 1e-12);
  }
}

TEST_CASE("explicit midpoint fields build the same cache") {
  const auto sys = tls(QuantumState::pure(basis(2, 1)), 1.0);
  const auto ctrl = ControlParameterization::sine_basis({0.5, 0.25}, 0.0, 1.0);
  const TimeGrid grid(0.0, 1.0, 20);
  std::vector<double> fields;
  for (std::size_t j = 0; j < grid.n_steps(); ++j) fields.push_back(ctrl.epsilon(grid.midpoint(j)));
  const auto a = build_step_propagators(sys, ctrl, grid);
  const auto b = build_step_propagators(sys, fields, grid);
  for (std::size_t j = 0; j < grid.n_steps(); ++j) CHECK(max_abs(a.unitaries[j] - b.unitaries[j]) == 0.0);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 10), GridError);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), GridError);
  const TimeGrid grid(0.0, 1.0, 10);
  CHECK(grid.node(10) == 1.0);
  CHECK(grid.node_index(0.3) == 3);
  CHECK_THROWS_AS(grid.node_index(0.35), DomainError);
}
