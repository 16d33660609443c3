#pragma once

// CSV ingestion/export and JSON result documents.
//
// CSV dialect: one header row, decimal point, a single-character delimiter
// (comma by default), no missing values.

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "confspec/estimator.hpp"
#include "confspec/scm.hpp"

namespace confspec::io {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows x header.size()
};

CsvTable parse_csv(std::istream& in, char delimiter = ',');
CsvTable read_csv(const std::filesystem::path& path, char delimiter = ',');

// Column selector: a header name, or a zero-based index when the text is all
// digits and no header cell carries that name.
std::size_t resolve_column(const CsvTable& table, const std::string& selector);

struct ColumnSelection {
  std::string target;
  std::vector<std::string> drop;
  std::optional<std::string> confounder;
};

struct SelectedData {
  scm::Dataset dataset;
  std::vector<std::string> predictor_names;
  std::string target_name;
};

SelectedData select_dataset(const CsvTable& table, const ColumnSelection& sel);

// Header x0..x{d-1},y[,z]; values printed with 17 significant digits.
void write_dataset_csv(const scm::Dataset& ds, std::ostream& out);
void write_dataset_csv(const scm::Dataset& ds, const std::filesystem::path& path);

std::string format_double(double v);

nlohmann::json to_json(const estimator::ConfoundingEstimate& est);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace confspec::io
