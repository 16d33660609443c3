#include "confspec/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace confspec::io {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto pos = rest.find(delimiter);
    cells.push_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return cells;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

CsvTable parse_csv(std::istream& in, char delimiter) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (auto& cell : split(line, delimiter)) table.header.push_back(unquote(std::move(cell)));
    break;
  }
  if (table.header.empty()) throw ParseError(line_no, 0, "missing header row");

  const std::size_t cols = table.header.size();
  std::vector<double> flat;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delimiter);
    if (cells.size() != cols) {
      throw ParseError(line_no, std::min(cells.size(), cols),
                       "expected " + std::to_string(cols) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string cell = unquote(cells[j]);
      if (cell.empty()) throw ParseError(line_no, j, "missing value in column '" + table.header[j] + "'");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(line_no, j, "non-numeric value '" + cell + "' in column '" + table.header[j] + "'");
      }
      flat.push_back(v);
    }
    ++rows;
  }
  table.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "' for reading");
  return parse_csv(in, delimiter);
}

std::size_t resolve_column(const CsvTable& table, const std::string& selector) {
  const auto it = std::find(table.header.begin(), table.header.end(), selector);
  if (it != table.header.end()) return static_cast<std::size_t>(it - table.header.begin());
  if (!selector.empty() && std::all_of(selector.begin(), selector.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    const std::size_t idx = std::stoul(selector);
    if (idx < table.header.size()) return idx;
  }
  fail(ErrorKind::InvalidInput, "no column '" + selector + "'");
}

SelectedData select_dataset(const CsvTable& table, const ColumnSelection& sel) {
  const std::size_t target = resolve_column(table, sel.target);
  std::vector<std::size_t> excluded{target};
  for (const auto& name : sel.drop) excluded.push_back(resolve_column(table, name));
  std::optional<std::size_t> confounder;
  if (sel.confounder) {
    confounder = resolve_column(table, *sel.confounder);
    excluded.push_back(*confounder);
  }

  SelectedData out;
  out.target_name = table.header[target];
  std::vector<Eigen::Index> predictors;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (std::find(excluded.begin(), excluded.end(), j) == excluded.end()) {
      predictors.push_back(static_cast<Eigen::Index>(j));
      out.predictor_names.push_back(table.header[j]);
    }
  }
  if (predictors.size() < 2) fail(ErrorKind::InvalidInput, "need at least 2 predictor columns");
  if (table.values.rows() < 2) fail(ErrorKind::InvalidInput, "need at least 2 data rows");

  out.dataset.x.resize(table.values.rows(), static_cast<Eigen::Index>(predictors.size()));
  for (std::size_t k = 0; k < predictors.size(); ++k) {
    out.dataset.x.col(static_cast<Eigen::Index>(k)) = table.values.col(predictors[k]);
  }
  out.dataset.y = table.values.col(static_cast<Eigen::Index>(target));
  if (confounder) out.dataset.z = table.values.col(static_cast<Eigen::Index>(*confounder));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset_csv(const scm::Dataset& ds, std::ostream& out) {
  for (Eigen::Index j = 0; j < ds.d(); ++j) out << 'x' << j << ',';
  out << 'y';
  if (ds.z) out << ",z";
  out << '\n';
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.d(); ++j) out << format_double(ds.x(i, j)) << ',';
    out << format_double(ds.y[i]);
    if (ds.z) out << ',' << format_double((*ds.z)[i]);
    out << '\n';
  }
}

void write_dataset_csv(const scm::Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_dataset_csv(ds, buf);
  write_text(path, buf.str());
}

nlohmann::json to_json(const estimator::ConfoundingEstimate& est) {
  nlohmann::json j;
  j["beta_hat"] = est.beta_hat;
  j["eta_hat"] = est.eta_hat;
  j["eta_unreliable"] = !est.eta_reliable;
  j["distance"] = est.distance;
  j["a_hat_norm_sq"] = est.a_hat_norm_sq;
  j["eigenvalues"] = to_vector(est.eigenvalues);
  j["observed_weights"] = to_vector(est.observed_weights);
  j["fitted_weights"] = to_vector(est.fitted_weights);
  j["warnings"] = est.warnings;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace confspec::io
