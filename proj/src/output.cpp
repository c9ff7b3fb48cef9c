#include "qoct/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace qoct {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string json_escape(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += ch;
    }
  }
  out += '"';
  return out;
}

namespace {

std::string json_number(double x) {
  // JSON has no literal for non-finite values.
  return std::isfinite(x) ? format_double(x) : "null";
}

std::string json_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += json_number(values[i]);
  }
  return out + "]";
}

}  // namespace

std::string to_json(const Table& table) {
  std::string out = "{\n  \"columns\": [";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ", ";
    out += json_escape(table.columns[c]);
  }
  out += "],\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += r ? ",\n    " : "\n    ";
    out += json_array(table.rows[r]);
  }
  out += table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  out << text;
}

std::filesystem::path write_table(const std::filesystem::path& dir, std::string_view stem,
                                  const Table& table, OutputFormat format) {
  const bool csv = format == OutputFormat::Csv;
  std::filesystem::path file = dir / (std::string(stem) + (csv ? ".csv" : ".json"));
  write_text(file, csv ? to_csv(table) : to_json(table));
  return file;
}

JsonObject& JsonObject::add(std::string_view key, std::string_view value) {
  return add_raw(key, json_escape(value));
}

JsonObject& JsonObject::add(std::string_view key, double value) {
  return add_raw(key, json_number(value));
}

JsonObject& JsonObject::add(std::string_view key, std::int64_t value) {
  return add_raw(key, std::to_string(value));
}

JsonObject& JsonObject::add(std::string_view key, std::uint64_t value) {
  return add_raw(key, std::to_string(value));
}

JsonObject& JsonObject::add(std::string_view key, const std::vector<double>& values) {
  return add_raw(key, json_array(values));
}

JsonObject& JsonObject::add_raw(std::string_view key, std::string raw) {
  fields_.emplace_back(std::string(key), std::move(raw));
  return *this;
}

std::string JsonObject::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    out += i ? ",\n  " : "\n  ";
    out += json_escape(fields_[i].first) + ": " + fields_[i].second;
  }
  out += fields_.empty() ? "}\n" : "\n}\n";
  return out;
}

Table trajectory_table(const StateTrajectory& trajectory, const Operator& observable) {
  const Eigen::Index dim = observable.dim();
  Table table;
  table.columns.push_back("t");
  for (Eigen::Index k = 0; k < dim; ++k) table.columns.push_back("population_" + std::to_string(k));
  table.columns.push_back("expectation");
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    const QuantumState& s = trajectory.at(j);
    std::vector<double> row{trajectory.grid.node(j)};
    for (Eigen::Index k = 0; k < dim; ++k) {
      row.push_back(s.is_pure() ? std::norm(s.vector()(k)) : s.matrix()(k, k).real());
    }
    row.push_back(expectation(s, observable).real());
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table pulse_table(const ControlParameterization& ctrl, const TimeGrid& grid) {
  Table table{{"t", "epsilon"}, {}};
  for (std::size_t j = 0; j < grid.node_count(); ++j) {
    const double t = grid.node(j);
    table.rows.push_back({t, ctrl.epsilon(t)});
  }
  return table;
}

Table kernel_table(const ResponseKernel& kernel) {
  Table table{{"tau", "re_chi", "im_chi"}, {}};
  for (std::size_t j = 0; j < kernel.values.size(); ++j) {
    table.rows.push_back({kernel.grid.node(j), kernel.values[j].real(), kernel.values[j].imag()});
  }
  return table;
}

Table contour_table(const ContourKernel& contour, const ResponseKernel& retarded) {
  Table table{{"tau", "re_forward", "im_forward", "re_backward", "im_backward", "re_difference",
               "im_difference", "re_retarded", "im_retarded"},
              {}};
  const std::vector<Complex> diff = contour.branch_difference();
  for (std::size_t j = 0; j < diff.size(); ++j) {
    table.rows.push_back({contour.grid.node(j), contour.forward[j].real(),
                          contour.forward[j].imag(), contour.backward[j].real(),
                          contour.backward[j].imag(), diff[j].real(), diff[j].imag(),
                          retarded.values[j].real(), retarded.values[j].imag()});
  }
  return table;
}

Table trace_table(const OptimizationTrace& trace) {
  Table table{{"iteration", "merit", "gradient_inf_norm", "step_size"}, {}};
  const std::size_t m = trace.records.empty() ? 0 : trace.records.front().params.size();
  for (std::size_t k = 0; k < m; ++k) table.columns.push_back("u_" + std::to_string(k));
  for (const IterationRecord& r : trace.records) {
    std::vector<double> row{static_cast<double>(r.iteration), r.merit, r.gradient_inf_norm,
                            r.step_size};
    row.insert(row.end(), r.params.begin(), r.params.end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string gradient_json(const GradientResult& result) {
  return JsonObject()
      .add("route", route_name(result.route))
      .add("merit", result.merit_value)
      .add("values", result.values)
      .str();
}

std::string summary_json(const OptimizationResult& result, GradientRoute route) {
  const OptimizationTrace& trace = result.trace;
  const IterationRecord& last = trace.records.back();
  return JsonObject()
      .add("route", route_name(route))
      .add("status", status_name(trace.status))
      .add("iterations", last.iteration)
      .add("initial_merit", trace.records.front().merit)
      .add("final_merit", last.merit)
      .add("gradient_inf_norm", last.gradient_inf_norm)
      .add("seed", trace.seed)
      .add("params", result.control.params())
      .str();
}

}  // namespace qoct
