#include "qmelab/result_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qmelab {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

namespace {

std::vector<std::string> column_names(const ExperimentResult& result) {
  std::vector<std::string> columns = {"arm", "x", "trace_distance", "fidelity"};
  if (result.has_norm_column) columns.push_back("one_minus_t_norm");
  for (const auto& l : result.exp_labels) columns.push_back("exp_" + l);
  columns.push_back("shots");
  columns.push_back("seed");
  columns.push_back("mode");
  return columns;
}

}  // namespace

std::string render_csv(const ExperimentResult& result, const Metadata& header) {
  std::ostringstream out;
  for (const auto& [key, value] : header) out << "# " << key << ": " << value << "\n";
  for (const auto& [key, value] : result.metadata)
    out << "# " << key << ": " << value << "\n";

  const auto columns = column_names(result);
  for (size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? "," : "\n");

  for (const auto& row : result.rows) {
    out << row.arm << "," << format_double(row.x) << ","
        << format_double(row.trace_distance) << "," << format_double(row.fidelity);
    if (result.has_norm_column)
      out << "," << (row.one_minus_t_norm ? format_double(*row.one_minus_t_norm) : "");
    for (const auto& cell : row.expectations)
      out << "," << (cell ? format_double(*cell) : "");
    out << "," << row.shots << "," << row.seed << "," << row.mode << "\n";
  }
  return out.str();
}

std::string render_json(const ExperimentResult& result, const Metadata& header) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta;
  for (const auto& [key, value] : header) meta[key] = value;
  for (const auto& [key, value] : result.metadata) meta[key] = value;
  doc["metadata"] = meta;
  doc["columns"] = column_names(result);

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    r.push_back(row.arm);
    r.push_back(row.x);
    r.push_back(row.trace_distance);
    r.push_back(row.fidelity);
    if (result.has_norm_column) {
      if (row.one_minus_t_norm)
        r.push_back(*row.one_minus_t_norm);
      else
        r.push_back(nullptr);
    }
    for (const auto& cell : row.expectations) {
      if (cell)
        r.push_back(*cell);
      else
        r.push_back(nullptr);
    }
    r.push_back(row.shots);
    r.push_back(row.seed);
    r.push_back(row.mode);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp);
    out << content;
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing output file: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("failed moving output into place: " + path);
  }
}

}  // namespace qmelab
