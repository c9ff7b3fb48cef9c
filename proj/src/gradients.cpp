#include "qoct/gradients.hpp"

#include <cmath>
#include <string>

namespace qoct {

const char* route_name(GradientRoute route) {
  switch (route) {
    case GradientRoute::Adjoint:
      return "adjoint";
    case GradientRoute::Response:
      return "response";
    case GradientRoute::Contour:
      return "contour";
    case GradientRoute::FiniteDifference:
      return "fd";
  }
  return "unknown";
}

std::vector<double> ResponseKernel::real_part() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const Complex& z : values) out.push_back(z.real());
  return out;
}

namespace {

void require_observable(const ControlledSystem& sys, const Operator& a) {
  if (!a.is_hermitian()) throw HermiticityError("observable must be Hermitian");
  if (a.dim() != sys.dim()) throw DimensionError("observable dimension does not match the system");
}

std::vector<double> project(const Eigen::MatrixXd& weights, const std::vector<double>& samples) {
  const Eigen::Map<const Eigen::VectorXd> s(samples.data(),
                                            static_cast<Eigen::Index>(samples.size()));
  const Eigen::VectorXd g = weights * s;
  return {g.data(), g.data() + g.size()};
}

void add_penalty(std::vector<double>& values, const Target& target,
                 const ControlParameterization& ctrl, const TimeGrid& grid) {
  if (target.kind() != TargetKind::Composite || target.penalty_alpha() == 0.0) return;
  const std::vector<double> d = fluence_gradient(ctrl, grid);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] -= target.penalty_alpha() * d[k];
}

// Node samples of the adjoint integrand, i.e. delta J1 / delta epsilon(t_j).
std::vector<double> adjoint_integrand(const ControlledSystem& sys,
                                      const StepPropagatorCache& cache,
                                      const StateTrajectory& forward, const Target& target) {
  const Operator& a = target.observable();
  const Matrix& v = sys.coupling().matrix();
  const std::size_t nodes = cache.grid.node_count();
  std::vector<double> integrand(nodes);

  if (sys.initial_state().is_pure()) {
    const CostateTrajectory costate =
        target.is_time_dependent()
            ? propagate_costate_backward_inhomogeneous(cache, forward, a, target.weights())
            : propagate_costate_backward(cache, a.matrix() * forward.nodes.back().vector());
    for (std::size_t j = 0; j < nodes; ++j) {
      const Vector& psi = forward.at(j).vector();
      integrand[j] = 2.0 * costate.at(j).dot(v * psi).imag();
    }
  } else {
    const ObservableTrajectory backward =
        target.is_time_dependent()
            ? propagate_observable_backward_inhomogeneous(cache, a, target.weights())
            : propagate_observable_backward(cache, a);
    for (std::size_t j = 0; j < nodes; ++j) {
      const Matrix& rho = forward.at(j).matrix();
      const Matrix& aj = backward.at(j);
      const Matrix comm = aj * v - v * aj;
      // Re(-i z) = Im z
      integrand[j] = trace_of_product(rho, comm).imag();
    }
  }
  return integrand;
}

}  // namespace

std::vector<Matrix> heisenberg_series(const StepPropagatorCache& cache, const Matrix& op) {
  std::vector<Matrix> out;
  out.reserve(cache.steps() + 1);
  Matrix p = Matrix::Identity(cache.dim(), cache.dim());
  out.push_back(op);
  for (const Matrix& u : cache.unitaries) {
    p = u * p;
    out.push_back(p.adjoint() * op * p);
  }
  return out;
}

ResponseKernel response_kernel(const ControlledSystem& sys, const StepPropagatorCache& cache,
                               const Operator& a) {
  require_observable(sys, a);
  const Matrix rho0 = sys.initial_state().density_matrix();
  const Matrix p_final = full_propagator(cache);
  const Matrix a_final = p_final.adjoint() * a.matrix() * p_final;
  // Tr{rho0 [A, V]} = Tr{[rho0, A] V}
  const Matrix c = rho0 * a_final - a_final * rho0;
  const Matrix& v = sys.coupling().matrix();

  ResponseKernel kernel{cache.grid, KernelKind::Retarded, {}};
  kernel.values.reserve(cache.grid.node_count());
  Matrix p = Matrix::Identity(cache.dim(), cache.dim());
  kernel.values.push_back(-kI * trace_of_product(c, v));
  for (const Matrix& u : cache.unitaries) {
    p = u * p;
    kernel.values.push_back(-kI * trace_of_product(c, Matrix(p.adjoint() * v * p)));
  }
  return kernel;
}

ResponseKernel response_kernel(const ControlledSystem& sys, const ControlParameterization& ctrl,
                               const TimeGrid& grid, const Operator& a) {
  return response_kernel(sys, build_step_propagators(sys, ctrl, grid), a);
}

ResponseMatrix response_kernel_matrix(const ControlledSystem& sys,
                                      const StepPropagatorCache& cache, const Operator& a) {
  require_observable(sys, a);
  const Matrix rho0 = sys.initial_state().density_matrix();
  const std::vector<Matrix> v_h = heisenberg_series(cache, sys.coupling().matrix());
  const std::vector<Matrix> a_h = heisenberg_series(cache, a.matrix());
  const auto nodes = static_cast<Eigen::Index>(cache.grid.node_count());

  ResponseMatrix out{cache.grid, Matrix::Zero(nodes, nodes)};
  for (Eigen::Index i = 0; i < nodes; ++i) {
    const Matrix& ai = a_h[static_cast<std::size_t>(i)];
    const Matrix c = rho0 * ai - ai * rho0;
    for (Eigen::Index j = 0; j <= i; ++j) {
      out.values(i, j) = -kI * trace_of_product(c, v_h[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

double evaluate_merit(const ControlledSystem& sys, const ControlParameterization& ctrl,
                      const TimeGrid& grid, const Target& target) {
  return merit(sys, ctrl, target, propagate_forward(sys, ctrl, grid));
}

GradientResult gradient_adjoint(const ControlledSystem& sys, const ControlParameterization& ctrl,
                                const TimeGrid& grid, const Target& target) {
  require_observable(sys, target.observable());
  target.check_grid(grid);
  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const StateTrajectory forward = propagate_forward(sys, cache);

  GradientResult result{{}, GradientRoute::Adjoint, merit(sys, ctrl, target, forward)};
  result.values =
      project(parameter_node_weights(ctrl, grid), adjoint_integrand(sys, cache, forward, target));
  add_penalty(result.values, target, ctrl, grid);
  return result;
}

GradientResult gradient_response(const ControlledSystem& sys,
                                 const ControlParameterization& ctrl, const TimeGrid& grid,
                                 const Target& target) {
  require_observable(sys, target.observable());
  target.check_grid(grid);
  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const StateTrajectory forward = propagate_forward(sys, cache);
  GradientResult result{{}, GradientRoute::Response, merit(sys, ctrl, target, forward)};

  std::vector<double> samples;
  if (!target.is_time_dependent()) {
    samples = response_kernel(sys, cache, target.observable()).real_part();
  } else {
    // Inner integral over observation times t in [tau_j, tf] by the
    // trapezoid rule; chi(t, tau) vanishes for tau > t.
    const ResponseMatrix chi = response_kernel_matrix(sys, cache, target.observable());
    const std::vector<double>& g = target.weights();
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();
    samples.assign(grid.node_count(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double inner = 0.0;
      for (std::size_t i = j; i <= n; ++i) {
        const double w = (i == j || i == n) ? 0.5 * dt : dt;
        inner += w * g[i] *
                 chi.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)).real();
      }
      samples[j] = inner;
    }
  }
  result.values = project(parameter_node_weights(ctrl, grid), samples);
  add_penalty(result.values, target, ctrl, grid);
  return result;
}

std::vector<double> functional_derivative(const ControlledSystem& sys,
                                          const ControlParameterization& ctrl,
                                          const TimeGrid& grid, const Target& target) {
  if (ctrl.kind() != ControlKind::RawGrid || ctrl.size() != grid.node_count() ||
      ctrl.t0() != grid.t0() || ctrl.tf() != grid.tf()) {
    throw GridError("functional derivative needs a raw-grid control sampled on the time grid");
  }
  require_observable(sys, target.observable());
  target.check_grid(grid);
  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const StateTrajectory forward = propagate_forward(sys, cache);
  std::vector<double> out = adjoint_integrand(sys, cache, forward, target);
  if (target.kind() == TargetKind::Composite) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] -= 2.0 * target.penalty_alpha() * ctrl.params()[j];
    }
  }
  return out;
}

GradientResult gradient_finite_difference(const ControlledSystem& sys,
                                          const ControlParameterization& ctrl,
                                          const TimeGrid& grid, const Target& target, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("finite-difference step must be > 0");
  GradientResult result{{}, GradientRoute::FiniteDifference,
                        evaluate_merit(sys, ctrl, grid, target)};
  result.values.resize(ctrl.size());
  std::vector<double> probe = ctrl.params();
  for (std::size_t k = 0; k < ctrl.size(); ++k) {
    const double base = probe[k];
    probe[k] = base + h;
    const double up = evaluate_merit(sys, ctrl.with_params(probe), grid, target);
    probe[k] = base - h;
    const double down = evaluate_merit(sys, ctrl.with_params(probe), grid, target);
    probe[k] = base;
    result.values[k] = (up - down) / (2.0 * h);
  }
  return result;
}

double kubo_delta_a(const ControlledSystem& sys, const ControlParameterization& ctrl0,
                    const TimeGrid& grid, const Operator& a, std::span<const double> f,
                    double t) {
  require_observable(sys, a);
  if (f.size() != grid.node_count()) {
    throw GridError("perturbation must be sampled on all " + std::to_string(grid.node_count()) +
                    " grid nodes");
  }
  const std::size_t i = grid.node_index(t);
  if (i == 0) return 0.0;

  const StepPropagatorCache cache = build_step_propagators(sys, ctrl0, grid);
  const std::vector<Matrix> p = cumulative_propagators(cache);
  const Matrix rho0 = sys.initial_state().density_matrix();
  const Matrix a_t = p[i].adjoint() * a.matrix() * p[i];
  const Matrix c = rho0 * a_t - a_t * rho0;
  const Matrix& v = sys.coupling().matrix();

  double delta = 0.0;
  for (std::size_t j = 0; j <= i; ++j) {
    if (f[j] == 0.0) continue;
    const double w = (j == 0 || j == i) ? 0.5 * grid.dt() : grid.dt();
    const Complex chi = -kI * trace_of_product(c, Matrix(p[j].adjoint() * v * p[j]));
    delta += w * f[j] * chi.real();
  }
  return delta;
}

std::pair<Operator, Operator> propagator_derivative(const ControlledSystem& sys,
                                                    const ControlParameterization& ctrl,
                                                    const TimeGrid& grid, std::size_t k,
                                                    double h) {
  if (k >= ctrl.size()) {
    throw IndexError("parameter index " + std::to_string(k) + " out of range");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("finite-difference step must be > 0");

  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const std::vector<Matrix> from_start = cumulative_propagators(cache);
  const Eigen::MatrixXd weights = parameter_node_weights(ctrl, grid);
  const Matrix& v = sys.coupling().matrix();
  const Eigen::Index dim = cache.dim();

  // U(tf, t_j) accumulated from the end of the grid.
  Matrix to_end = Matrix::Identity(dim, dim);
  Matrix integral = Matrix::Zero(dim, dim);
  for (std::size_t j = grid.n_steps() + 1; j-- > 0;) {
    if (j < grid.n_steps()) to_end = to_end * cache.unitaries[j];
    const double w = weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    if (w != 0.0) integral += w * (to_end * v * from_start[j]);
  }
  integral *= -kI;

  std::vector<double> probe = ctrl.params();
  const double base = probe[k];
  probe[k] = base + h;
  const Matrix up = full_propagator(build_step_propagators(sys, ctrl.with_params(probe), grid));
  probe[k] = base - h;
  const Matrix down = full_propagator(build_step_propagators(sys, ctrl.with_params(probe), grid));
  const Matrix fd = (up - down) / (2.0 * h);
  return {Operator(std::move(integral)), Operator(fd)};
}

}  // namespace qoct
