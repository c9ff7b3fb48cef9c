#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "qoct/model.hpp"
#include "qoct/propagation.hpp"
#include "test_support.hpp"

using namespace qoct;
using namespace qoct::testing;

namespace {

ControlledSystem rabi_system(double tf = 1.0) {
  return ControlledSystem(Operator::zero(2), Operator::hermitian(sigma_x()),
                          QuantumState::pure(basis(2, 0)), 0.0, tf);
}

std::vector<ControlParameterization> all_kinds(const std::vector<double>& u, double t0,
                                               double tf) {
  return {ControlParameterization::piecewise_constant(u, t0, tf),
          ControlParameterization::sine_basis(u, t0, tf),
          ControlParameterization::raw_grid(u, t0, tf)};
}

}  // namespace

TEST_CASE("epsilon examples") {
  const auto pc = ControlParameterization::piecewise_constant({0.5, -0.2}, 0.0, 2.0);
  CHECK(epsilon(pc, 1.5) == -0.2);
  CHECK(epsilon(pc, 0.3) == 0.5);
  CHECK(epsilon(pc, 1.0) == -0.2);  // right-open bins
  CHECK(epsilon(pc, 2.0) == -0.2);  // last bin closed

  const auto sine = ControlParameterization::sine_basis({1.0}, 0.0, 1.0);
  CHECK(epsilon(sine, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  const auto many = ControlParameterization::sine_basis({0.3, -1.2, 2.5}, 0.0, 1.0);
  CHECK(epsilon(many, 0.0) == 0.0);
  CHECK(epsilon(many, 1.0) == 0.0);

  const auto raw = ControlParameterization::raw_grid({0.0, 1.0, 4.0}, 0.0, 2.0);
  CHECK(epsilon(raw, 0.5) == doctest::Approx(0.5));
  CHECK(epsilon(raw, 1.5) == doctest::Approx(2.5));
  CHECK(epsilon(raw, 2.0) == 4.0);
}

TEST_CASE("epsilon outside the window is a DomainError") {
  for (const auto& c : all_kinds({1.0, 2.0}, 0.0, 1.0)) {
    CHECK_THROWS_AS(epsilon(c, -0.1), DomainError);
    CHECK_THROWS_AS(epsilon(c, 1.0001), DomainError);
  }
}

TEST_CASE("depsilon_du examples") {
  const auto pc = ControlParameterization::piecewise_constant({0.5, -0.2}, 0.0, 2.0);
  CHECK(depsilon_du(pc, 0, 0.4) == 1.0);
  CHECK(depsilon_du(pc, 0, 1.4) == 0.0);

  // index 1 is the second sine mode
  const auto sine = ControlParameterization::sine_basis({0.0, 0.0, 0.0}, 0.0, 1.0);
  CHECK(depsilon_du(sine, 1, 0.25) == doctest::Approx(1.0).epsilon(1e-15));

  const auto raw = ControlParameterization::raw_grid({3.0, -1.0, 2.0, 7.0, 0.5}, 0.0, 2.0);
  for (std::size_t j = 0; j < 5; ++j) {
    const double t = 0.5 * static_cast<double>(j);
    CHECK(depsilon_du(raw, j, t) == 1.0);
    CHECK(epsilon(raw, t) == raw.params()[j]);
  }
  CHECK_THROWS_AS(depsilon_du(raw, 5, 0.1), IndexError);
}

TEST_CASE("parameterizations are linear in u") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = uniform_params(6, rng, -2.0, 2.0);
    const auto w = uniform_params(6, rng, -2.0, 2.0);
    const double a = 0.7;
    const double b = -1.3;
    std::vector<double> mix(6);
    for (std::size_t k = 0; k < 6; ++k) mix[k] = a * u[k] + b * w[k];
    const auto us = all_kinds(u, 0.0, 3.0);
    const auto ws = all_kinds(w, 0.0, 3.0);
    const auto mixes = all_kinds(mix, 0.0, 3.0);
    for (std::size_t kind = 0; kind < 3; ++kind) {
      for (double t : uniform_params(25, rng, 0.0, 3.0)) {
        const double lhs = mixes[kind].epsilon(t);
        const double rhs = a * us[kind].epsilon(t) + b * ws[kind].epsilon(t);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * std::max(1.0, std::abs(lhs)) * 10);

        double expanded = 0.0;
        for (std::size_t k = 0; k < 6; ++k) expanded += u[k] * depsilon_du(us[kind], k, t);
        CHECK(std::abs(expanded - us[kind].epsilon(t)) <=
              1e-13 * std::max(1.0, std::abs(expanded)));
      }
    }
  }
}

TEST_CASE("hamiltonian_at") {
  const Operator z = Operator::hermitian(sigma_z());
  const Operator x = Operator::hermitian(sigma_x());
  const ControlledSystem sys(z, x, QuantumState::pure(basis(2, 0)), 0.0, 1.0);

  const auto off = ControlParameterization::piecewise_constant({0.0}, 0.0, 1.0);
  CHECK(max_abs(hamiltonian_at(sys, off, 0.3).matrix() - sigma_z()) == 0.0);

  const auto on = ControlParameterization::sine_basis({1.0}, 0.0, 1.0);
  const Operator h = hamiltonian_at(sys, on, 0.5);
  CHECK(h.is_hermitian());
  CHECK(max_abs(h.matrix() - (sigma_z() + sigma_x())) <= 1e-15);

  const auto u = ControlParameterization::piecewise_constant({0.8}, 0.0, 1.0);
  CHECK(max_abs(hamiltonian_at(rabi_system(), u, 0.2).matrix() - 0.8 * sigma_x()) == 0.0);
}

TEST_CASE("system construction validates operators and window") {
  const Operator x = Operator::hermitian(sigma_x());
  CHECK_THROWS_AS(ControlledSystem(Operator(sigma_x() * Complex(0, 1)), x,
                                   QuantumState::pure(basis(2, 0)), 0.0, 1.0),
                  HermiticityError);
  CHECK_THROWS_AS(ControlledSystem(x, Operator::identity(3), QuantumState::pure(basis(2, 0)), 0.0,
                                   1.0),
                  DimensionError);
  CHECK_THROWS_AS(ControlledSystem(x, x, QuantumState::pure(basis(2, 0)), 1.0, 1.0), DomainError);
}

TEST_CASE("merit examples") {
  const ControlledSystem sys = rabi_system();
  const TimeGrid grid(0.0, 1.0, 1000);
  const auto ctrl =
      ControlParameterization::piecewise_constant({std::numbers::pi / 4}, 0.0, 1.0);
  const StateTrajectory traj = propagate_forward(sys, ctrl, grid);

  // analytic Rabi population sin^2(uT)
  const Target excited = Target::final_time(Operator::hermitian(projector(2, 1)));
  CHECK(std::abs(merit(sys, ctrl, excited, traj) - 0.5) <= 1e-8);

  const Target id = Target::final_time(Operator::identity(2));
  CHECK(std::abs(merit(sys, ctrl, id, traj) - 1.0) <= 1e-12);

  const Target silent = Target::time_dependent(Operator::hermitian(projector(2, 1)),
                                               std::vector<double>(grid.node_count(), 0.0));
  CHECK(merit(sys, ctrl, silent, traj) == 0.0);
}

TEST_CASE("time-dependent merit integrates the analytic Rabi population") {
  const ControlledSystem sys = rabi_system(2.0);
  const TimeGrid grid(0.0, 2.0, 2000);
  const double u = 0.9;
  const auto ctrl = ControlParameterization::piecewise_constant({u}, 0.0, 2.0);
  const Target td = Target::time_dependent(Operator::hermitian(projector(2, 1)),
                                           std::vector<double>(grid.node_count(), 1.0));
  // integral_0^T sin^2(u t) dt = T/2 - sin(2uT)/(4u)
  const double exact = 1.0 - std::sin(2.0 * u * 2.0) / (4.0 * u);
  CHECK(std::abs(merit(sys, ctrl, td, propagate_forward(sys, ctrl, grid)) - exact) <= 1e-6);
}

TEST_CASE("identity merit is one for any control (trace preservation)") {
  std::mt19937_64 rng(17);
  const TimeGrid grid(0.0, 2.0, 400);
  for (Eigen::Index dim : {2, 3, 6}) {
    const ControlledSystem pure(Operator::hermitian(random_hermitian(dim, rng)),
                                Operator::hermitian(random_hermitian(dim, rng)),
                                QuantumState::pure(random_pure(dim, rng)), 0.0, 2.0);
    const ControlledSystem mixed = pure.with_initial_state(
        QuantumState::density(random_density(dim, rng)));
    for (const auto& ctrl : all_kinds(uniform_params(5, rng, -3.0, 3.0), 0.0, 2.0)) {
      const Target id = Target::final_time(Operator::identity(dim));
      CHECK(std::abs(merit(pure, ctrl, id, propagate_forward(pure, ctrl, grid)) - 1.0) <= 1e-9);
      CHECK(std::abs(merit(mixed, ctrl, id, propagate_forward(mixed, ctrl, grid)) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("merit rejects mismatched grid and weights") {
  const ControlledSystem sys = rabi_system();
  const auto ctrl = ControlParameterization::piecewise_constant({0.1}, 0.0, 1.0);
  const TimeGrid grid(0.0, 1.0, 10);
  const StateTrajectory traj = propagate_forward(sys, ctrl, grid);
  const Target bad = Target::time_dependent(Operator::identity(2), std::vector<double>(5, 1.0));
  CHECK_THROWS_AS(merit(sys, ctrl, bad, traj), GridError);

  StateTrajectory truncated = traj;
  truncated.nodes.pop_back();
  CHECK_THROWS_AS(merit(sys, ctrl, Target::final_time(Operator::identity(2)), truncated),
                  GridError);
}

TEST_CASE("fluence and its gradient") {
  const TimeGrid grid(0.0, 2.0, 64);
  const auto pc = ControlParameterization::piecewise_constant({1.0, -2.0, 0.5, 3.0}, 0.0, 2.0);
  // bins align with steps, so the one-sided trapezoid is exact
  CHECK(fluence(pc, grid) == doctest::Approx(0.5 * (1.0 + 4.0 + 0.25 + 9.0)).epsilon(1e-14));
  const auto grad = fluence_gradient(pc, grid);
  CHECK(grad[1] == doctest::Approx(2.0 * 0.5 * -2.0).epsilon(1e-14));

  // sine modes are orthogonal under the trapezoid rule: d/du_k = u_k (tf - t0)
  const std::vector<double> u{0.4, -1.1, 0.7};
  const auto sine = ControlParameterization::sine_basis(u, 0.0, 2.0);
  const auto sgrad = fluence_gradient(sine, grid);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(std::abs(sgrad[k] - 2.0 * u[k]) <= 1e-12);
}

TEST_CASE("parameter node weights integrate each basis function") {
  const TimeGrid grid(0.0, 1.0, 100);
  const auto pc = ControlParameterization::piecewise_constant({0, 0, 0, 0}, 0.0, 1.0);
  const Eigen::MatrixXd w = parameter_node_weights(pc, grid);
  for (Eigen::Index k = 0; k < 4; ++k) CHECK(w.row(k).sum() == doctest::Approx(0.25));

  const auto raw = ControlParameterization::raw_grid(std::vector<double>(101, 0.0), 0.0, 1.0);
  const Eigen::MatrixXd wr = parameter_node_weights(raw, grid);
  const auto trap = grid.trapezoid_weights();
  for (Eigen::Index k = 0; k < 101; ++k) {
    CHECK(wr(k, k) == doctest::Approx(trap[static_cast<std::size_t>(k)]));
    CHECK(wr.row(k).sum() == doctest::Approx(trap[static_cast<std::size_t>(k)]));
  }
}
