#pragma once

#include "protomech/numerics/grid.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace protomech::numerics {

/// Column-oriented numeric table; every cell is written with 17 significant
/// digits so a write/read cycle reproduces the doubles bit for bit.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;
};

std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

nlohmann::json grid_to_json(const PeriodicGrid& grid);
PeriodicGrid grid_from_json(const nlohmann::json& j);

using NamedColumn = std::pair<std::string, Eigen::VectorXd>;

/// How the leading columns of a field snapshot identify grid points.
enum class PointLabels { Index, Coordinate };

/// Writes `<stem>.csv` (point columns followed by value columns) and
/// `<stem>.json` (grid dims and column names).
void write_field_snapshot(const std::filesystem::path& stem, const PeriodicGrid& grid,
                          const std::vector<NamedColumn>& values, PointLabels labels = PointLabels::Index,
                          const std::vector<std::string>& coordinate_names = {});

struct FieldSnapshot {
  PeriodicGrid grid;
  std::vector<NamedColumn> values;

  const Eigen::VectorXd& value(const std::string& name) const;
};

FieldSnapshot read_field_snapshot(const std::filesystem::path& stem);

}  // namespace protomech::numerics
