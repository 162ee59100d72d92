#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netfactor/rational.hpp"
#include "netfactor/simharness.hpp"

namespace netfactor {

// On-disk system description: dimensions plus row-major matrices. Doubles
// are written in shortest round-trip form, so save/load is lossless.
struct SystemFile {
  int schema_version = 1;
  StateSpace sys;
  std::vector<std::string> labels;  // optional manifest signal names
};

std::string system_to_json(const SystemFile& file);
SystemFile system_from_json(const std::string& text);

struct CertificateFile {
  int schema_version = 1;
  Matrix s;
  Matrix t;
  Matrix j;
};

std::string certificate_to_json(const CertificateFile& file);
CertificateFile certificate_from_json(const std::string& text);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

// Whole-file helpers; throw ParseError naming the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Built-in example systems shipped as regression fixtures.
std::vector<std::string> example_names();
SystemFile example_system(const std::string& name);

// Transfer matrix entries as reduced rational functions.
std::vector<std::vector<Rational>> transfer_matrix_rationals(const StateSpace& sys,
                                                             double cancel_tol = 1e-6);

std::string render_matrix(const Matrix& m, int precision = 4);
std::string render_rational_grid(const std::string& name,
                                 const std::vector<std::vector<Rational>>& grid,
                                 int precision = 4);
std::string render_residual_report(const ResidualReport& report, int precision = 4);

// A command's result: a human-readable report plus named files to write.
struct ReportBundle {
  std::string text;
  std::vector<std::pair<std::string, std::string>> files;
};

}  // namespace netfactor
