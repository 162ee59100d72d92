#include "netfactor/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "netfactor/dsf.hpp"

namespace netfactor {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& name) {
  require(j.is_array() && static_cast<Eigen::Index>(j.size()) == rows,
          ErrorCode::ParseError, "matrix " + name + " must have " + std::to_string(rows) +
                                     " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            ErrorCode::ParseError,
            "matrix " + name + " row " + std::to_string(i) + " must have " +
                std::to_string(cols) + " columns");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& cell = row[static_cast<std::size_t>(k)];
      require(cell.is_number(), ErrorCode::ParseError,
              "matrix " + name + " has a non-numeric entry");
      m(i, k) = cell.get<double>();
    }
  }
  check_finite(m, name);
  return m;
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorCode::ParseError, "malformed JSON document");
  return j;
}

Matrix square_matrix_from_json(const json& doc, const char* key, const std::string& name) {
  require(doc.contains(key), ErrorCode::ParseError, "missing field " + std::string(key));
  const json& j = doc[key];
  require(j.is_array(), ErrorCode::ParseError, "field " + std::string(key) + " must be an array");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  require(rows > 0, ErrorCode::ParseError, "matrix " + name + " must be non-empty");
  require(j[0].is_array(), ErrorCode::ParseError, "matrix " + name + " must be nested rows");
  Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  require(rows == cols, ErrorCode::ParseError, "matrix " + name + " must be square");
  return matrix_from_json(j, rows, cols, name);
}

constexpr int kSchemaVersion = 1;

}  // namespace

std::string system_to_json(const SystemFile& file) {
  check_dimensions(file.sys);
  json doc;
  doc["schema_version"] = file.schema_version;
  doc["n"] = file.sys.order();
  doc["p"] = file.sys.outputs();
  doc["m"] = file.sys.inputs();
  doc["a"] = matrix_to_json(file.sys.a);
  doc["b"] = matrix_to_json(file.sys.b);
  doc["c"] = matrix_to_json(file.sys.c);
  doc["d"] = matrix_to_json(file.sys.d);
  if (!file.labels.empty()) doc["labels"] = file.labels;
  return doc.dump(2) + "\n";
}

SystemFile system_from_json(const std::string& text) {
  json doc = parse_text(text);
  require(doc.is_object(), ErrorCode::ParseError, "system document must be a JSON object");
  SystemFile file;
  file.schema_version = doc.value("schema_version", 0);
  require(file.schema_version == kSchemaVersion, ErrorCode::ParseError,
          "unsupported schema_version");
  for (const char* key : {"n", "p", "m", "a", "b", "c", "d"})
    require(doc.contains(key), ErrorCode::ParseError, "missing field " + std::string(key));
  require(doc["n"].is_number_integer() && doc["p"].is_number_integer() &&
              doc["m"].is_number_integer(),
          ErrorCode::ParseError, "dimensions must be integers");
  Eigen::Index n = doc["n"].get<Eigen::Index>();
  Eigen::Index p = doc["p"].get<Eigen::Index>();
  Eigen::Index m = doc["m"].get<Eigen::Index>();
  require(n > 0 && p > 0 && m > 0, ErrorCode::ParseError, "dimensions must be positive");
  file.sys.a = matrix_from_json(doc["a"], n, n, "a");
  file.sys.b = matrix_from_json(doc["b"], n, m, "b");
  file.sys.c = matrix_from_json(doc["c"], p, n, "c");
  file.sys.d = matrix_from_json(doc["d"], p, m, "d");
  if (doc.contains("labels")) {
    const json& labels = doc["labels"];
    require(labels.is_array() && static_cast<Eigen::Index>(labels.size()) == p,
            ErrorCode::ParseError, "labels must list one name per manifest signal");
    for (const json& label : labels) {
      require(label.is_string(), ErrorCode::ParseError, "labels must be strings");
      file.labels.push_back(label.get<std::string>());
    }
  }
  check_dimensions(file.sys);
  return file;
}

std::string certificate_to_json(const CertificateFile& file) {
  json doc;
  doc["schema_version"] = file.schema_version;
  doc["s"] = matrix_to_json(file.s);
  doc["t"] = matrix_to_json(file.t);
  doc["j"] = matrix_to_json(file.j);
  return doc.dump(2) + "\n";
}

CertificateFile certificate_from_json(const std::string& text) {
  json doc = parse_text(text);
  require(doc.is_object(), ErrorCode::ParseError, "certificate document must be a JSON object");
  CertificateFile file;
  file.schema_version = doc.value("schema_version", 0);
  require(file.schema_version == kSchemaVersion, ErrorCode::ParseError,
          "unsupported schema_version");
  file.s = square_matrix_from_json(doc, "s", "s");
  file.t = square_matrix_from_json(doc, "t", "t");
  file.j = square_matrix_from_json(doc, "j", "j");
  require(file.s.rows() == file.t.rows(), ErrorCode::ParseError,
          "certificate blocks s and t must share dimension");
  return file;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["trials"] = cfg.trials;
  doc["seed"] = cfg.seed;
  doc["max_are_dim"] = cfg.max_are_dim;
  doc["l2_range"] = {cfg.dims.l2_min, cfg.dims.l2_max};
  doc["p_range"] = {cfg.dims.p_min, cfg.dims.p_max};
  doc["l_range"] = {cfg.dims.l_min, cfg.dims.l_max};
  doc["parallel"] = cfg.mode == Execution::Parallel;
  doc["tolerances"] = {{"residual", cfg.tolerances.residual},
                       {"rank", cfg.tolerances.rank},
                       {"pd", cfg.tolerances.pd},
                       {"dedup", cfg.tolerances.dedup}};
  return doc.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc = parse_text(text);
  require(doc.is_object(), ErrorCode::ParseError, "config document must be a JSON object");
  ExperimentConfig cfg;
  cfg.trials = doc.value("trials", cfg.trials);
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.max_are_dim = doc.value("max_are_dim", cfg.max_are_dim);
  auto range = [&doc](const char* key, int& lo, int& hi) {
    if (!doc.contains(key)) return;
    const json& j = doc[key];
    require(j.is_array() && j.size() == 2 && j[0].is_number_integer() &&
                j[1].is_number_integer(),
            ErrorCode::ParseError, "field " + std::string(key) + " must be [min, max]");
    lo = j[0].get<int>();
    hi = j[1].get<int>();
  };
  range("l2_range", cfg.dims.l2_min, cfg.dims.l2_max);
  range("p_range", cfg.dims.p_min, cfg.dims.p_max);
  range("l_range", cfg.dims.l_min, cfg.dims.l_max);
  if (doc.value("parallel", true))
    cfg.mode = Execution::Parallel;
  else
    cfg.mode = Execution::Serial;
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    require(t.is_object(), ErrorCode::ParseError, "tolerances must be an object");
    cfg.tolerances.residual = t.value("residual", cfg.tolerances.residual);
    cfg.tolerances.rank = t.value("rank", cfg.tolerances.rank);
    cfg.tolerances.pd = t.value("pd", cfg.tolerances.pd);
    cfg.tolerances.dedup = t.value("dedup", cfg.tolerances.dedup);
  }
  require(cfg.trials >= 0, ErrorCode::ParseError, "trials must be nonnegative");
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorCode::ParseError, "cannot read " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  require(out.good(), ErrorCode::ParseError, "cannot write " + path);
}

std::vector<std::string> example_names() {
  return {"paper-2d", "paper-4a-second", "paper-fullnoise"};
}

SystemFile example_system(const std::string& name) {
  SystemFile file;
  if (name == "paper-2d") {
    file.sys.a = Matrix{{-1, 0, 4}, {0, -2, 5}, {-6, 0, -3}};
    file.sys.b = Matrix{{1, 0}, {0, 1}, {0, 0}};
  } else if (name == "paper-4a-second") {
    file.sys.a = Matrix{{-3.3, -2.9, 4}, {-2.9, -5.7, 5}, {-8.3, -3.7, 3}};
    file.sys.b = Matrix{{1, 0}, {0, 1}, {0, 0}};
  } else if (name == "paper-fullnoise") {
    file.sys.a = Matrix{{-1, 0, 4}, {0, -2, 5}, {-6, 0, -3}};
    file.sys.b = Matrix::Identity(3, 3);
  } else {
    throw Error(ErrorCode::ParseError, "unknown example: " + name);
  }
  file.sys.c = Matrix{{1, 0, 0}, {0, 1, 0}};
  file.sys.d = Matrix::Zero(2, file.sys.b.cols());
  file.labels = {"y1", "y2"};
  return file;
}

std::vector<std::vector<Rational>> transfer_matrix_rationals(const StateSpace& sys,
                                                             double cancel_tol) {
  std::vector<std::vector<Rational>> grid;
  for (Eigen::Index i = 0; i < sys.outputs(); ++i) {
    std::vector<Rational> row;
    for (Eigen::Index j = 0; j < sys.inputs(); ++j)
      row.push_back(transfer_entry(sys, i, j, cancel_tol));
    grid.push_back(std::move(row));
  }
  return grid;
}

std::string render_matrix(const Matrix& m, int precision) {
  std::vector<std::vector<std::string>> cells;
  std::size_t width = 1;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::ostringstream cell;
      cell << std::setprecision(precision) << m(i, j);
      row.push_back(cell.str());
      width = std::max(width, row.back().size());
    }
    cells.push_back(std::move(row));
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    out << "  [";
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << "  ";
      out << std::setw(static_cast<int>(width)) << row[j];
    }
    out << "]\n";
  }
  return out.str();
}

std::string render_rational_grid(const std::string& name,
                                 const std::vector<std::vector<Rational>>& grid,
                                 int precision) {
  std::ostringstream out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid[i].size(); ++j)
      out << name << "(" << i + 1 << "," << j + 1
          << ") = " << rational_to_string(grid[i][j], precision) << "\n";
  return out.str();
}

std::string render_residual_report(const ResidualReport& report, int precision) {
  std::ostringstream out;
  out << std::setprecision(precision);
  std::size_t width = 1;
  for (const auto& [label, value] : report.entries) width = std::max(width, label.size());
  for (const auto& [label, value] : report.entries)
    out << "  " << std::left << std::setw(static_cast<int>(width)) << label << std::right
        << "  " << value << "\n";
  out << "  worst " << report.worst() << " against tolerance " << report.tol << ": "
      << (report.pass ? "pass" : "FAIL") << "\n";
  return out.str();
}

}  // namespace netfactor
