#include "qoct/routes.hpp"

#include "qoct/contour.hpp"

namespace qoct {

std::optional<GradientRoute> parse_route(std::string_view name) {
  if (name == "adjoint") return GradientRoute::Adjoint;
  if (name == "response") return GradientRoute::Response;
  if (name == "contour") return GradientRoute::Contour;
  if (name == "fd") return GradientRoute::FiniteDifference;
  return std::nullopt;
}

GradientResult evaluate_gradient(GradientRoute route, const ControlledSystem& sys,
                                 const ControlParameterization& ctrl, const TimeGrid& grid,
                                 const Target& target, double fd_step) {
  switch (route) {
    case GradientRoute::Adjoint:
      return gradient_adjoint(sys, ctrl, grid, target);
    case GradientRoute::Response:
      return gradient_response(sys, ctrl, grid, target);
    case GradientRoute::Contour:
      return gradient_contour(sys, ctrl, grid, target);
    case GradientRoute::FiniteDifference:
      return gradient_finite_difference(sys, ctrl, grid, target, fd_step);
  }
  return gradient_adjoint(sys, ctrl, grid, target);
}

}  // namespace qoct
