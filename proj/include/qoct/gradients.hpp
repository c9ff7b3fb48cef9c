#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qoct/linalg.hpp"
#include "qoct/model.hpp"
#include "qoct/propagation.hpp"

namespace qoct {

enum class GradientRoute { Adjoint, Response, Contour, FiniteDifference };

const char* route_name(GradientRoute route);

/// dG/du_k together with G at the evaluation point.
struct GradientResult {
  std::vector<double> values;
  GradientRoute route;
  double merit_value;
};

enum class KernelKind { Retarded, Contour };

/// chi_{A,V}(tf, tau_j) sampled on every node.
///
/// Complex samples are kept so the vanishing imaginary part can be checked;
/// the physical kernel is the real part.
struct ResponseKernel {
  TimeGrid grid;
  KernelKind kind;
  std::vector<Complex> values;

  std::vector<double> real_part() const;
};

/// chi_{A,V}(t_i, tau_j) for all node pairs; zero for tau_j > t_i.
struct ResponseMatrix {
  TimeGrid grid;
  Matrix values;  // row i = observation time t_i, column j = tau_j
};

/// Heisenberg operators O_H(t_j) = U(t_j,t0)^dagger O U(t_j,t0) on every node.
std::vector<Matrix> heisenberg_series(const StepPropagatorCache& cache, const Matrix& op);

ResponseKernel response_kernel(const ControlledSystem& sys, const StepPropagatorCache& cache,
                               const Operator& a);
ResponseKernel response_kernel(const ControlledSystem& sys, const ControlParameterization& ctrl,
                               const TimeGrid& grid, const Operator& a);

ResponseMatrix response_kernel_matrix(const ControlledSystem& sys,
                                      const StepPropagatorCache& cache, const Operator& a);

/// G[u] from a fresh forward propagation.
double evaluate_merit(const ControlledSystem& sys, const ControlParameterization& ctrl,
                      const TimeGrid& grid, const Target& target);

/// Forward state plus backward costate (pure) or backward observable
/// (density), contracted into 2 Im<chi|V|psi> resp. -i Tr{rho [A(t), V]}.
GradientResult gradient_adjoint(const ControlledSystem& sys, const ControlParameterization& ctrl,
                                const TimeGrid& grid, const Target& target);

/// Convolution of the retarded response kernel with d epsilon/du. Time-
/// dependent targets use the full chi(t, tau) double integral.
GradientResult gradient_response(const ControlledSystem& sys,
                                 const ControlParameterization& ctrl, const TimeGrid& grid,
                                 const Target& target);

/// delta G / delta epsilon(t_j) on every node. Requires a raw-grid control
/// whose samples coincide with the grid nodes.
std::vector<double> functional_derivative(const ControlledSystem& sys,
                                          const ControlParameterization& ctrl,
                                          const TimeGrid& grid, const Target& target);

inline constexpr double kDefaultFdStep = 1e-5;

/// Central differences (G[u + h e_k] - G[u - h e_k]) / 2h.
GradientResult gradient_finite_difference(const ControlledSystem& sys,
                                          const ControlParameterization& ctrl,
                                          const TimeGrid& grid, const Target& target,
                                          double h = kDefaultFdStep);

/// First-order change of <A>(t) under the perturbation f(t) V on top of the
/// driven evolution H[u](t), from the generalized retarded kernel. f is
/// sampled on the grid nodes and t must be a node.
double kubo_delta_a(const ControlledSystem& sys, const ControlParameterization& ctrl0,
                    const TimeGrid& grid, const Operator& a, std::span<const double> f, double t);

/// d U(tf, t0) / d u_k two ways: the integral
/// -i integral U(tf,t) (d epsilon/du_k)(t) V U(t,t0) dt on the grid, and the
/// central difference of the full discrete propagator.
std::pair<Operator, Operator> propagator_derivative(const ControlledSystem& sys,
                                                    const ControlParameterization& ctrl,
                                                    const TimeGrid& grid, std::size_t k,
                                                    double h = kDefaultFdStep);

}  // namespace qoct
