#include "qoct/contour.hpp"

#include <cmath>
#include <string>

namespace qoct {

Contour::Contour(double t0, double tf) : t0_(t0), tf_(tf) {
  if (!(tf > t0)) throw DomainError("contour requires tf > t0");
}

std::strong_ordering Contour::compare(const ContourTime& a, const ContourTime& b) const {
  for (const ContourTime* p : {&a, &b}) {
    if (!(p->t >= t0_ && p->t <= tf_)) {
      throw DomainError("contour time " + std::to_string(p->t) + " outside [" +
                        std::to_string(t0_) + ", " + std::to_string(tf_) + "]");
    }
  }
  if (a.branch != b.branch) {
    return a.branch == Branch::Forward ? std::strong_ordering::less
                                       : std::strong_ordering::greater;
  }
  if (a.t == b.t) return std::strong_ordering::equal;
  const bool earlier = a.branch == Branch::Forward ? a.t < b.t : a.t > b.t;
  return earlier ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::strong_ordering contour_order(const Contour& contour, const ContourTime& a,
                                   const ContourTime& b) {
  return contour.compare(a, b);
}

std::vector<Complex> ContourKernel::branch_difference() const {
  std::vector<Complex> out(forward.size());
  for (std::size_t j = 0; j < forward.size(); ++j) out[j] = forward[j] - backward[j];
  return out;
}

ContourKernel contour_kernel(const ControlledSystem& sys, const StepPropagatorCache& cache,
                             const Operator& a) {
  if (!a.is_hermitian()) throw HermiticityError("observable must be Hermitian");
  if (a.dim() != sys.dim()) throw DimensionError("observable dimension does not match the system");

  const Matrix rho0 = sys.initial_state().density_matrix();
  const Matrix p_final = full_propagator(cache);
  const Matrix a_turn = p_final.adjoint() * a.matrix() * p_final;
  // T_C puts the later contour argument on the left: A(tf) is later than
  // any forward-branch tau and earlier than any backward-branch tau.
  const Matrix later_a = rho0 * a_turn;  // Tr{rho0 A V} = Tr{(rho0 A) V}
  const Matrix later_v = a_turn * rho0;  // Tr{rho0 V A} = Tr{(A rho0) V}

  ContourKernel kernel{cache.grid, {}, {}};
  const std::vector<Matrix> v_h = heisenberg_series(cache, sys.coupling().matrix());
  kernel.forward.reserve(v_h.size());
  kernel.backward.reserve(v_h.size());
  for (const Matrix& v : v_h) {
    kernel.forward.push_back(-kI * trace_of_product(later_a, v));
    kernel.backward.push_back(-kI * trace_of_product(later_v, v));
  }
  return kernel;
}

ContourKernel contour_kernel(const ControlledSystem& sys, const ControlParameterization& ctrl,
                             const TimeGrid& grid, const Operator& a) {
  return contour_kernel(sys, build_step_propagators(sys, ctrl, grid), a);
}

std::vector<Complex> contour_integral(const ContourKernel& kernel,
                                      const ControlParameterization& ctrl) {
  const Eigen::MatrixXd w = parameter_node_weights(ctrl, kernel.grid);
  std::vector<Complex> out(ctrl.size(), Complex{0.0, 0.0});
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    Complex forward_leg{0.0, 0.0};
    Complex backward_leg{0.0, 0.0};
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      forward_leg += w(k, j) * kernel.forward[static_cast<std::size_t>(j)];
      backward_leg += w(k, j) * kernel.backward[static_cast<std::size_t>(j)];
    }
    // integral_{tf}^{t0} = -integral_{t0}^{tf}
    out[static_cast<std::size_t>(k)] = forward_leg - backward_leg;
  }
  return out;
}

GradientResult gradient_contour(const ControlledSystem& sys, const ControlParameterization& ctrl,
                                const TimeGrid& grid, const Target& target) {
  if (target.is_time_dependent()) {
    throw UnsupportedTargetError(
        "contour gradient is defined for final-time targets only; use the adjoint or response "
        "route for time-dependent targets");
  }
  const StepPropagatorCache cache = build_step_propagators(sys, ctrl, grid);
  const StateTrajectory forward = propagate_forward(sys, cache);
  GradientResult result{{}, GradientRoute::Contour, merit(sys, ctrl, target, forward)};

  const std::vector<Complex> integral =
      contour_integral(contour_kernel(sys, cache, target.observable()), ctrl);
  result.values.reserve(integral.size());
  for (const Complex& z : integral) result.values.push_back(z.real());
  if (target.kind() == TargetKind::Composite && target.penalty_alpha() != 0.0) {
    const std::vector<double> d = fluence_gradient(ctrl, grid);
    for (std::size_t k = 0; k < d.size(); ++k) result.values[k] -= target.penalty_alpha() * d[k];
  }
  return result;
}

}  // namespace qoct
