#include "qoct/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qoct/routes.hpp"

namespace qoct {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<Complex> complex_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of [re, im] pairs");
  std::vector<Complex> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    const json& pair = v[i];
    if (!pair.is_array() || pair.size() != 2) fail(item, "expected a [re, im] pair");
    out.emplace_back(number(pair[0], item + "[0]"), number(pair[1], item + "[1]"));
  }
  return out;
}

Matrix matrix_from(const std::vector<Complex>& entries, Eigen::Index dim) {
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = entries[static_cast<std::size_t>(r * dim + c)];
  }
  return m;
}

Matrix square_matrix(const json& v, const std::string& path, Eigen::Index dim) {
  const std::vector<Complex> entries = complex_list(v, path);
  if (entries.size() != static_cast<std::size_t>(dim * dim)) {
    fail(path, "expected " + std::to_string(dim * dim) + " row-major entries for dimension " +
                   std::to_string(dim) + ", got " + std::to_string(entries.size()));
  }
  return matrix_from(entries, dim);
}

// Wraps numerical validation errors with the field that caused them.
template <class Fn>
auto with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const HermiticityError& e) {
    throw HermiticityError(path + ": " + e.what());
  } catch (const StateError& e) {
    throw StateError(path + ": " + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const IndexError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const GridError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Operator hermitian_field(const json& v, const std::string& path, Eigen::Index dim) {
  Matrix m = square_matrix(v, path, dim);
  return with_path(path, [&] { return Operator::hermitian(std::move(m)); });
}

QuantumState state_field(const json& v, const std::string& path, Eigen::Index dim) {
  const std::vector<Complex> entries = complex_list(v, path);
  if (entries.size() == static_cast<std::size_t>(dim)) {
    Vector psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi(i) = entries[static_cast<std::size_t>(i)];
    return with_path(path, [&] { return QuantumState::pure(std::move(psi)); });
  }
  if (entries.size() == static_cast<std::size_t>(dim * dim)) {
    Matrix rho = matrix_from(entries, dim);
    return with_path(path, [&] { return QuantumState::density(std::move(rho)); });
  }
  fail(path, "expected " + std::to_string(dim) + " amplitudes (pure state) or " +
                 std::to_string(dim * dim) + " entries (density matrix)");
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Vector basis_vector(Eigen::Index dim, Eigen::Index k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return v;
}

struct ParsedSystem {
  Operator h_static;
  Operator coupling;
  QuantumState initial_state;
};

ParsedSystem parse_system(const json& node) {
  const std::string path = "system";
  reject_unknown(node, path, {"preset", "dim", "h_static", "coupling", "initial_state"});
  if (node.contains("preset")) {
    const std::string name = string(node.at("preset"), path + ".preset");
    auto preset = system_preset(name);
    if (!preset) fail(path + ".preset", "unknown preset '" + name + "'");
    for (const char* key : {"h_static", "coupling"}) {
      if (node.contains(key)) fail(path + "." + key, "cannot be combined with a preset");
    }
    const Eigen::Index dim = preset->h_static.dim();
    if (node.contains("dim") && integer(node.at("dim"), path + ".dim") != dim) {
      fail(path + ".dim", "preset '" + name + "' has dimension " + std::to_string(dim));
    }
    if (node.contains("initial_state")) {
      preset->initial_state = state_field(node.at("initial_state"), path + ".initial_state", dim);
    }
    return {preset->h_static, preset->coupling, preset->initial_state};
  }
  const long long dim = integer(require(node, path, "dim"), path + ".dim");
  if (dim < 1 || dim > 256) fail(path + ".dim", "dimension must lie in [1, 256]");
  const auto n = static_cast<Eigen::Index>(dim);
  return {hermitian_field(require(node, path, "h_static"), path + ".h_static", n),
          hermitian_field(require(node, path, "coupling"), path + ".coupling", n),
          state_field(require(node, path, "initial_state"), path + ".initial_state", n)};
}

ControlParameterization parse_control(const json& node, std::uint64_t seed) {
  const std::string path = "control";
  reject_unknown(node, path, {"kind", "params", "param_count", "t0", "tf"});
  const std::string kind = string(require(node, path, "kind"), path + ".kind");
  const double t0 = number(require(node, path, "t0"), path + ".t0");
  const double tf = number(require(node, path, "tf"), path + ".tf");
  if (!(tf > t0)) fail(path + ".tf", "must be greater than t0");

  std::vector<double> params;
  if (node.contains("params")) {
    if (node.contains("param_count")) {
      fail(path + ".param_count", "give either params or param_count, not both");
    }
    params = number_list(node.at("params"), path + ".params");
    if (params.empty()) fail(path + ".params", "must not be empty");
  } else {
    const long long count = integer(require(node, path, "param_count"), path + ".param_count");
    if (count < 1) fail(path + ".param_count", "must be >= 1");
    params = initial_guess(static_cast<std::size_t>(count), seed);
  }

  return with_path(path, [&] {
    if (kind == "piecewise_constant") {
      return ControlParameterization::piecewise_constant(params, t0, tf);
    }
    if (kind == "sine_basis") return ControlParameterization::sine_basis(params, t0, tf);
    if (kind == "raw_grid") return ControlParameterization::raw_grid(params, t0, tf);
    fail(path + ".kind", "expected piecewise_constant, sine_basis or raw_grid, got '" + kind + "'");
  });
}

Operator parse_observable(const json& node, const std::string& path, Eigen::Index dim) {
  if (!node.is_string()) return hermitian_field(node, path, dim);
  const std::string name = node.get<std::string>();
  if (name == "identity") return Operator::identity(dim);
  const std::string prefix = "population:";
  if (name.rfind(prefix, 0) == 0) {
    long long k = -1;
    try {
      std::size_t used = 0;
      k = std::stoll(name.substr(prefix.size()), &used);
      if (used != name.size() - prefix.size()) k = -1;
    } catch (const std::exception&) {
      k = -1;
    }
    if (k < 0 || k >= dim) {
      fail(path, "population index must lie in [0, " + std::to_string(dim - 1) + "]");
    }
    const Vector e = basis_vector(dim, static_cast<Eigen::Index>(k));
    return Operator::hermitian(e * e.adjoint());
  }
  fail(path, "unknown observable preset '" + name + "' (use population:<k> or identity)");
}

Target parse_target(const json& node, Eigen::Index dim, const TimeGrid& grid) {
  const std::string path = "target";
  reject_unknown(node, path, {"kind", "observable", "g", "penalty_alpha"});
  const std::string kind = string(require(node, path, "kind"), path + ".kind");
  Operator a = parse_observable(require(node, path, "observable"), path + ".observable", dim);

  std::optional<std::vector<double>> g;
  if (node.contains("g")) {
    g = number_list(node.at("g"), path + ".g");
    if (g->size() != grid.node_count()) {
      fail(path + ".g", "expected " + std::to_string(grid.node_count()) +
                            " samples (n_steps + 1), got " + std::to_string(g->size()));
    }
  }
  double alpha = 0.0;
  if (node.contains("penalty_alpha")) {
    if (kind != "composite") fail(path + ".penalty_alpha", "only valid for composite targets");
    alpha = number(node.at("penalty_alpha"), path + ".penalty_alpha");
    if (alpha < 0.0) fail(path + ".penalty_alpha", "must be >= 0");
  }

  if (kind == "final_time") {
    if (g) fail(path + ".g", "not valid for final_time targets");
    return Target::final_time(std::move(a));
  }
  if (kind == "time_dependent") {
    if (!g) fail(path + ".g", "missing required field");
    return Target::time_dependent(std::move(a), std::move(*g));
  }
  if (kind == "composite") return Target::composite(std::move(a), alpha, std::move(g));
  fail(path + ".kind", "expected final_time, time_dependent or composite, got '" + kind + "'");
}

OptimizationConfig parse_optimize(const json* node, std::uint64_t seed) {
  OptimizationConfig cfg;
  cfg.seed = seed;
  if (node == nullptr) return cfg;
  const std::string path = "optimize";
  reject_unknown(*node, path,
                 {"route", "max_iterations", "tol_gradient", "tol_merit", "initial_step",
                  "backtrack_factor", "armijo_c", "lbfgs_memory", "fd_step"});
  if (node->contains("route")) {
    const std::string name = string(node->at("route"), path + ".route");
    auto route = parse_route(name);
    if (!route) fail(path + ".route", "expected adjoint, response, contour or fd");
    cfg.route = *route;
  }
  if (node->contains("max_iterations")) {
    cfg.max_iterations = static_cast<int>(integer(node->at("max_iterations"), path + ".max_iterations"));
  }
  if (node->contains("lbfgs_memory")) {
    cfg.lbfgs_memory = static_cast<int>(integer(node->at("lbfgs_memory"), path + ".lbfgs_memory"));
  }
  auto real_field = [&](const char* key, double& out) {
    if (node->contains(key)) out = number(node->at(key), path + "." + key);
  };
  real_field("tol_gradient", cfg.tol_gradient);
  real_field("tol_merit", cfg.tol_merit);
  real_field("initial_step", cfg.initial_step);
  real_field("backtrack_factor", cfg.backtrack_factor);
  real_field("armijo_c", cfg.armijo_c);
  real_field("fd_step", cfg.fd_step);
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace

std::optional<SystemPreset> system_preset(const std::string& name) {
  const Vector ground2 = basis_vector(2, 0);
  if (name == "rabi") {
    return SystemPreset{Operator::zero(2), Operator::hermitian(pauli_x()),
                        QuantumState::pure(ground2)};
  }
  if (name == "tls-sigmaz-sigmax") {
    return SystemPreset{Operator::hermitian(pauli_z()), Operator::hermitian(pauli_x()),
                        QuantumState::pure(ground2)};
  }
  if (name == "ladder3") {
    // Anharmonic three-level ladder with nearest-neighbour dipole coupling.
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 1.9;
    Matrix v = Matrix::Zero(3, 3);
    v(0, 1) = v(1, 0) = 1.0;
    v(1, 2) = v(2, 1) = std::sqrt(2.0);
    return SystemPreset{Operator::hermitian(h), Operator::hermitian(v),
                        QuantumState::pure(basis_vector(3, 0))};
  }
  return std::nullopt;
}

ProblemConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  reject_unknown(doc, "", {"seed", "system", "control", "grid", "target", "optimize"});

  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    const long long s = integer(doc.at("seed"), "seed");
    if (s < 0) fail("seed", "must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  }

  ParsedSystem parsed = parse_system(require(doc, "", "system"));
  ControlParameterization control = parse_control(require(doc, "", "control"), seed);

  const json& grid_node = require(doc, "", "grid");
  reject_unknown(grid_node, "grid", {"n_steps"});
  const long long n_steps = integer(require(grid_node, "grid", "n_steps"), "grid.n_steps");
  if (n_steps < 1) fail("grid.n_steps", "must be >= 1");
  TimeGrid grid(control.t0(), control.tf(), static_cast<std::size_t>(n_steps));

  ControlledSystem system = with_path("system", [&] {
    return ControlledSystem(parsed.h_static, parsed.coupling, parsed.initial_state, control.t0(),
                            control.tf());
  });
  Target target = parse_target(require(doc, "", "target"), system.dim(), grid);
  OptimizationConfig optimize =
      parse_optimize(doc.contains("optimize") ? &doc.at("optimize") : nullptr, seed);

  return ProblemConfig{std::move(system), std::move(control), grid, std::move(target), optimize,
                       seed};
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace qoct
