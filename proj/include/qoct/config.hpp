#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "qoct/model.hpp"
#include "qoct/optimizer.hpp"
#include "qoct/trajectory.hpp"

namespace qoct {

/// Fully validated problem description read from a JSON config.
struct ProblemConfig {
  ControlledSystem system;
  ControlParameterization control;
  TimeGrid grid;
  Target target;
  OptimizationConfig optimize;
  std::uint64_t seed;
};

/// Named test systems: "rabi", "tls-sigmaz-sigmax", "ladder3".
/// Returns (h_static, coupling, initial_state) or nullopt for unknown names.
struct SystemPreset {
  Operator h_static;
  Operator coupling;
  QuantumState initial_state;
};
std::optional<SystemPreset> system_preset(const std::string& name);

/// Parses a config document.
///
/// Syntax and schema problems (unknown fields, wrong types, wrong sizes)
/// throw ConfigError with the line/column or the dotted field path.
/// Non-Hermitian operators and invalid states throw HermiticityError or
/// StateError, also prefixed with the field path.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::filesystem::path& path);

}  // namespace qoct
