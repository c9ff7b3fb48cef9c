#pragma once

#include <compare>
#include <vector>

#include "qoct/gradients.hpp"
#include "qoct/linalg.hpp"
#include "qoct/model.hpp"
#include "qoct/propagation.hpp"

namespace qoct {

enum class Branch { Forward, Backward };

/// A point on the closed time path t0 -> tf -> t0.
struct ContourTime {
  Branch branch;
  double t;
};

/// Real-time two-branch contour over [t0, tf].
///
/// Forward points are ordered by ascending t, every backward point comes
/// after every forward point, and backward points are ordered by descending
/// t. The turning point tf on the forward branch precedes tf on the
/// backward branch.
class Contour {
 public:
  Contour(double t0, double tf);

  double t0() const { return t0_; }
  double tf() const { return tf_; }

  /// Contour-order comparison; less means "earlier on the contour".
  /// Throws DomainError for times outside [t0, tf].
  std::strong_ordering compare(const ContourTime& a, const ContourTime& b) const;

 private:
  double t0_;
  double tf_;
};

std::strong_ordering contour_order(const Contour& contour, const ContourTime& a,
                                   const ContourTime& b);

/// chi^C(tf, tau) with A pinned at the turning point.
///
/// forward[j]  = -i Tr{rho0 A_H(tf) V_H(tau_j)}
/// backward[j] = -i Tr{rho0 V_H(tau_j) A_H(tf)}
struct ContourKernel {
  TimeGrid grid;
  std::vector<Complex> forward;
  std::vector<Complex> backward;

  /// forward - backward, nodewise; equals the retarded kernel.
  std::vector<Complex> branch_difference() const;
};

ContourKernel contour_kernel(const ControlledSystem& sys, const StepPropagatorCache& cache,
                             const Operator& a);
ContourKernel contour_kernel(const ControlledSystem& sys, const ControlParameterization& ctrl,
                             const TimeGrid& grid, const Operator& a);

/// Contour integral of (d epsilon/du_k)(tau) chi^C(tf, tau), complex valued.
/// The backward leg runs from tf to t0 and enters with a minus sign.
std::vector<Complex> contour_integral(const ContourKernel& kernel,
                                      const ControlParameterization& ctrl);

/// Throws UnsupportedTargetError for targets that integrate over the trajectory.
GradientResult gradient_contour(const ControlledSystem& sys, const ControlParameterization& ctrl,
                                const TimeGrid& grid, const Target& target);

}  // namespace qoct
