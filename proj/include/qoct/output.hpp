#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qoct/contour.hpp"
#include "qoct/gradients.hpp"
#include "qoct/optimizer.hpp"

namespace qoct {

/// Shortest form that still carries 17 significant digits ("%.17g").
std::string format_double(double x);

enum class OutputFormat { Csv, Json };

/// Column-oriented numeric table.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& table);
/// {"columns": [...], "rows": [[...], ...]}
std::string to_json(const Table& table);

/// Writes <dir>/<stem>.csv or <dir>/<stem>.json; returns the path written.
std::filesystem::path write_table(const std::filesystem::path& dir, std::string_view stem,
                                  const Table& table, OutputFormat format);
void write_text(const std::filesystem::path& file, const std::string& text);

/// Ordered JSON object emitter with fixed float formatting.
class JsonObject {
 public:
  JsonObject& add(std::string_view key, std::string_view value);
  JsonObject& add(std::string_view key, const char* value) {
    return add(key, std::string_view(value));
  }
  JsonObject& add(std::string_view key, double value);
  JsonObject& add(std::string_view key, std::int64_t value);
  JsonObject& add(std::string_view key, std::uint64_t value);
  JsonObject& add(std::string_view key, int value) {
    return add(key, static_cast<std::int64_t>(value));
  }
  JsonObject& add(std::string_view key, const std::vector<double>& values);
  /// Inserts already-serialized JSON.
  JsonObject& add_raw(std::string_view key, std::string raw);

  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_escape(std::string_view s);

// Tables emitted by the command-line front end.
Table trajectory_table(const StateTrajectory& trajectory, const Operator& observable);
Table pulse_table(const ControlParameterization& ctrl, const TimeGrid& grid);
Table kernel_table(const ResponseKernel& kernel);
Table contour_table(const ContourKernel& contour, const ResponseKernel& retarded);
Table trace_table(const OptimizationTrace& trace);

std::string gradient_json(const GradientResult& result);
std::string summary_json(const OptimizationResult& result, GradientRoute route);

}  // namespace qoct
