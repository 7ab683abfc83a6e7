#pragma once

// Run artifacts: RFC-4180 CSV tables, JSON sidecars carrying the run header,
// and gnuplot scripts that plot a table.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "elab/config.hpp"
#include "elab/coupled.hpp"

namespace elab::lab {

using json = nlohmann::ordered_json;

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);
/// Quotes a field when it holds a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double>& values);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  /// CRLF line endings, header first.
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline const std::vector<std::string> kSweepColumns{
    "hbar", "N", "beta", "T", "err_density_L2", "err_momentum_L1", "err_momentum_L54", "err_pressure_L1",
    "M0", "Mmax", "Cstar", "certified_T"};

CsvTable sweep_table(const coupled::StudyReport& rep);

std::string git_describe();

/// {hbar, N, beta, d, n, L, dt, git_describe, theorem_regime} plus the
/// pipeline name and seed. Sweeps pass lists through `extra`.
json run_header(const ExperimentConfig& cfg, int n, double L, double dt);

/// The N-threshold diagnostic for (N, hbar, T0), with C_V taken as
/// ||V||_{L1} + ||V||_{Linf}. Reported, never enforced.
json restriction_report(const PhysicalScales& s, const Potential& v, double energy, double t0);

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  int xcol = 1;               // 1-based CSV columns
  std::vector<int> ycols{2};
  bool logx = false;
  bool logy = false;
};

std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& columns,
                           const PlotSpec& plot);

class ReportWriter {
 public:
  explicit ReportWriter(std::filesystem::path dir);

  /// stem.csv plus stem.json = {header, summary, columns, table}.
  void table(const std::string& stem, const CsvTable& t, const json& header, const json& summary = json::object());
  void plot(const std::string& stem, const CsvTable& t, const PlotSpec& plot);
  void document(const std::string& name, const json& doc);
  void text(const std::string& name, const std::string& body);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& artifacts() const noexcept { return artifacts_; }

 private:
  void put(const std::string& name, const std::string& body);

  std::filesystem::path dir_;
  std::vector<std::string> artifacts_;
};

}  // namespace elab::lab
