#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rydress/config.hpp"

namespace rydress {

/// "%.10g", with inf/nan spelled out.
std::string format_number(double v);

/// Comma-separated table with a header row; columns carry units in their
/// names.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Every field of the resolved configuration, defaults included.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Number or null for non-finite values.
nlohmann::json finite_or_null(double v);

}  // namespace rydress
