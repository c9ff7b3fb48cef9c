#include "qoct/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include "CLI11.hpp"
#include "qoct/config.hpp"
#include "qoct/contour.hpp"
#include "qoct/output.hpp"
#include "qoct/routes.hpp"

namespace qoct {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::string out_dir = ".";
  double fd_step = kDefaultFdStep;
  std::string format = "csv";
  std::string route = "adjoint";
};

OutputFormat output_format(const CommonOptions& opts) {
  return opts.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

fs::path prepare_out_dir(const CommonOptions& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void require_finite(const std::vector<double>& values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(std::string(what) + " contains non-finite values");
  }
}

int cmd_validate(const CommonOptions& opts, std::ostream& out) {
  const ProblemConfig cfg = load_config(opts.config);
  out << "ok: dim=" << cfg.system.dim() << " params=" << cfg.control.size()
      << " n_steps=" << cfg.grid.n_steps() << "\n";
  return 0;
}

int cmd_simulate(const CommonOptions& opts, std::ostream& out) {
  const ProblemConfig cfg = load_config(opts.config);
  const fs::path dir = prepare_out_dir(opts);
  const StateTrajectory forward = propagate_forward(cfg.system, cfg.control, cfg.grid);
  const double g = merit(cfg.system, cfg.control, cfg.target, forward);
  if (!std::isfinite(g)) throw Error("merit is not finite");
  write_table(dir, "trajectory", trajectory_table(forward, cfg.target.observable()),
              output_format(opts));
  write_table(dir, "pulse", pulse_table(cfg.control, cfg.grid), output_format(opts));
  out << "merit " << format_double(g) << "\n";
  return 0;
}

int cmd_gradient(const CommonOptions& opts, std::ostream& out) {
  const auto route = parse_route(opts.route);
  if (!route) throw ConfigError("--route must be adjoint, response, contour or fd");
  const ProblemConfig cfg = load_config(opts.config);
  const fs::path dir = prepare_out_dir(opts);
  const GradientResult result =
      evaluate_gradient(*route, cfg.system, cfg.control, cfg.grid, cfg.target, opts.fd_step);
  require_finite(result.values, "gradient");
  write_text(dir / "gradient.json", gradient_json(result));
  out << "merit " << format_double(result.merit_value) << "\n";
  return 0;
}

int cmd_respond(const CommonOptions& opts, std::ostream& out) {
  const ProblemConfig cfg = load_config(opts.config);
  const fs::path dir = prepare_out_dir(opts);
  const ResponseKernel kernel =
      response_kernel(cfg.system, cfg.control, cfg.grid, cfg.target.observable());
  write_table(dir, "kernel", kernel_table(kernel), output_format(opts));
  out << "nodes " << kernel.values.size() << "\n";
  return 0;
}

int cmd_contour_check(const CommonOptions& opts, std::ostream& out) {
  const ProblemConfig cfg = load_config(opts.config);
  const fs::path dir = prepare_out_dir(opts);
  const StepPropagatorCache cache = build_step_propagators(cfg.system, cfg.control, cfg.grid);
  const ContourKernel contour = contour_kernel(cfg.system, cache, cfg.target.observable());
  const ResponseKernel retarded = response_kernel(cfg.system, cache, cfg.target.observable());
  write_table(dir, "kernel", contour_table(contour, retarded), output_format(opts));

  double worst = 0.0;
  const std::vector<Complex> diff = contour.branch_difference();
  for (std::size_t j = 0; j < diff.size(); ++j) {
    worst = std::max(worst, std::abs(diff[j] - retarded.values[j]));
  }
  out << "max |forward - backward - retarded| " << format_double(worst) << "\n";
  return 0;
}

int cmd_optimize(const CommonOptions& opts, std::ostream& out) {
  const ProblemConfig cfg = load_config(opts.config);
  OptimizationConfig settings = cfg.optimize;
  settings.fd_step = opts.fd_step;
  const fs::path dir = prepare_out_dir(opts);
  const OptimizationResult result =
      maximize(cfg.system, cfg.control, cfg.grid, cfg.target, settings);
  write_table(dir, "trace", trace_table(result.trace), output_format(opts));
  write_table(dir, "pulse", pulse_table(result.control, cfg.grid), output_format(opts));
  write_text(dir / "summary.json", summary_json(result, settings.route));
  const IterationRecord& last = result.trace.records.back();
  out << status_name(result.trace.status) << " after " << last.iteration
      << " iterations, merit " << format_double(last.merit) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum optimal control: gradients by adjoint, response and contour routes"};
  app.require_subcommand(1);

  CommonOptions opts;
  using Handler = std::function<int(const CommonOptions&, std::ostream&)>;
  std::map<CLI::App*, std::pair<Handler, bool>> handlers;  // bool: validate-style errors

  auto add = [&](const std::string& name, const std::string& help, Handler fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", opts.config, "Problem configuration (JSON)")->required();
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--fd-step", opts.fd_step, "Central finite-difference step")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", opts.format, "Time-series output format")
        ->check(CLI::IsMember({"csv", "json"}));
    handlers[sub] = {std::move(fn), name == "validate"};
    return sub;
  };
  add("validate", "Parse and check a configuration", cmd_validate);
  add("simulate", "Forward propagation: trajectory.csv and pulse.csv", cmd_simulate);
  add("gradient", "Merit gradient: gradient.json", cmd_gradient)
      ->add_option("--route", opts.route, "adjoint | response | contour | fd")
      ->check(CLI::IsMember({"adjoint", "response", "contour", "fd"}));
  add("respond", "Retarded response kernel: kernel.csv", cmd_respond);
  add("contour-check", "Both contour branches and their difference: kernel.csv",
      cmd_contour_check);
  add("optimize", "Maximize the merit: trace.csv, summary.json, pulse.csv", cmd_optimize);

  std::vector<std::string> argv_storage{"qoct"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto& [handler, validate_only] = handlers.at(chosen);
  try {
    return handler(opts, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const UnsupportedTargetError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return validate_only ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qoct
