#pragma once

#include <optional>
#include <string_view>

#include "qoct/gradients.hpp"

namespace qoct {

/// Parses "adjoint", "response", "contour" or "fd".
std::optional<GradientRoute> parse_route(std::string_view name);

/// Dispatches to the gradient engine selected by route.
GradientResult evaluate_gradient(GradientRoute route, const ControlledSystem& sys,
                                 const ControlParameterization& ctrl, const TimeGrid& grid,
                                 const Target& target, double fd_step = kDefaultFdStep);

}  // namespace qoct
