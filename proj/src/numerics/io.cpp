#include "protomech/numerics/io.hpp"

#include "protomech/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace protomech::numerics {

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw InvalidInput("CsvTable: row width does not match header");
  rows.push_back(std::move(row));
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw InvalidInput("CsvTable: no column named '" + name + "'");
}

Eigen::VectorXd CsvTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  Eigen::VectorXd v(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) v[static_cast<Index>(r)] = rows[r][c];
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string to_csv_string(const CsvTable& table) {
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

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("write_csv: cannot open " + path.string());
  os << to_csv_string(table);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s) {
  // strtod handles the "inf"/"nan" spellings printf emits.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw InvalidInput("read_csv: bad number '" + s + "'");
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("read_csv: cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("read_csv: empty file " + path.string());
  t.columns = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_double(cell));
    t.add_row(std::move(row));
  }
  return t;
}

nlohmann::json grid_to_json(const PeriodicGrid& grid) {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& ax : grid.axes())
    dims.push_back({{"points", ax.points}, {"length", ax.length}, {"lower", ax.lower}});
  return dims;
}

PeriodicGrid grid_from_json(const nlohmann::json& j) {
  std::vector<Axis> axes;
  for (const auto& d : j) {
    axes.push_back(Axis{d.at("points").get<Index>(), d.at("length").get<double>(), d.value("lower", 0.0)});
  }
  return PeriodicGrid(std::move(axes));
}

void write_field_snapshot(const std::filesystem::path& stem, const PeriodicGrid& grid,
                          const std::vector<NamedColumn>& values, PointLabels labels,
                          const std::vector<std::string>& coordinate_names) {
  CsvTable t;
  const Index d = grid.dimension();
  for (Index a = 0; a < d; ++a) {
    if (labels == PointLabels::Coordinate && static_cast<Index>(coordinate_names.size()) == d)
      t.columns.push_back(coordinate_names[static_cast<std::size_t>(a)]);
    else
      t.columns.push_back((labels == PointLabels::Index ? "i" : "x") + std::to_string(a));
  }
  for (const auto& [name, v] : values) {
    if (v.size() != grid.size()) throw InvalidInput("write_field_snapshot: column '" + name + "' has wrong length");
    t.columns.push_back(name);
  }
  t.rows.reserve(static_cast<std::size_t>(grid.size()));
  for (Index i = 0; i < grid.size(); ++i) {
    std::vector<double> row;
    row.reserve(t.columns.size());
    for (Index a = 0; a < d; ++a)
      row.push_back(labels == PointLabels::Index ? static_cast<double>(grid.index_along(i, a)) : grid.coordinate(i, a));
    for (const auto& nv : values) row.push_back(nv.second[i]);
    t.rows.push_back(std::move(row));
  }
  std::filesystem::path csv = stem;
  csv += ".csv";
  write_csv(csv, t);

  nlohmann::json header;
  header["dims"] = grid_to_json(grid);
  header["point_labels"] = labels == PointLabels::Index ? "index" : "coordinate";
  header["columns"] = t.columns;
  std::filesystem::path js = stem;
  js += ".json";
  std::ofstream os(js, std::ios::binary);
  if (!os) throw InvalidInput("write_field_snapshot: cannot open " + js.string());
  os << header.dump(2) << '\n';
}

const Eigen::VectorXd& FieldSnapshot::value(const std::string& name) const {
  for (const auto& nv : values)
    if (nv.first == name) return nv.second;
  throw InvalidInput("FieldSnapshot: no column named '" + name + "'");
}

FieldSnapshot read_field_snapshot(const std::filesystem::path& stem) {
  std::filesystem::path js = stem;
  js += ".json";
  std::ifstream is(js, std::ios::binary);
  if (!is) throw InvalidInput("read_field_snapshot: cannot open " + js.string());
  const nlohmann::json header = nlohmann::json::parse(is);
  FieldSnapshot snap{grid_from_json(header.at("dims")), {}};
  std::filesystem::path csv = stem;
  csv += ".csv";
  const CsvTable t = read_csv(csv);
  if (static_cast<Index>(t.rows.size()) != snap.grid.size())
    throw InvalidInput("read_field_snapshot: row count does not match grid");
  for (std::size_t c = static_cast<std::size_t>(snap.grid.dimension()); c < t.columns.size(); ++c)
    snap.values.emplace_back(t.columns[c], t.column(t.columns[c]));
  return snap;
}

}  // namespace protomech::numerics
