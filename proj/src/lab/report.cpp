#include "elab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace elab::lab {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw ValidationError("a table needs at least one column");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw ValidationError("row has " + std::to_string(cells.size()) + " cells, table has " +
                          std::to_string(columns_.size()) + " columns");
  rows_.push_back(std::move(cells));
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += "\r\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

CsvTable sweep_table(const coupled::StudyReport& rep) {
  CsvTable t(kSweepColumns);
  for (const auto& r : rep.rows)
    t.add_row(std::vector<double>{r.job.hbar, r.job.N, r.job.beta, r.T, r.err_density_L2, r.err_momentum_L1,
                                  r.err_momentum_L54, r.err_pressure_L1, r.M0, r.Mmax, r.Cstar, r.certified_T});
  return t;
}

std::string git_describe() { return ELAB_GIT_DESCRIBE; }

json run_header(const ExperimentConfig& cfg, int n, double L, double dt) {
  json h;
  h["hbar"] = cfg.scales.hbar;
  h["N"] = cfg.scales.N;
  h["beta"] = cfg.scales.beta;
  h["d"] = cfg.scales.d;
  h["n"] = n;
  h["L"] = L;
  h["dt"] = dt;
  h["git_describe"] = git_describe();
  h["theorem_regime"] = cfg.theorem_regime();
  h["pipeline"] = to_string(cfg.pipeline);
  h["seed"] = cfg.seed;
  return h;
}

json restriction_report(const PhysicalScales& s, const Potential& v, double energy, double t0) {
  const double c_v = v.norms.l1 + v.norms.linf;
  const auto r = restriction_diagnostic(s, c_v, energy, t0);
  json j;
  j["C_V"] = c_v;
  j["E0"] = energy;
  j["T0"] = t0;
  j["ln_ln_N"] = r.lhs_log_log_N;
  j["required_ln_ln_N"] = r.rhs_exponent;
  j["satisfied"] = r.satisfied;
  return j;
}

std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& columns,
                           const PlotSpec& plot) {
  auto col_ok = [&](int c) { return c >= 1 && c <= static_cast<int>(columns.size()); };
  if (!col_ok(plot.xcol)) throw ValidationError("plot x column out of range");
  std::ostringstream os;
  const auto stem = csv_name.substr(0, csv_name.rfind('.'));
  os << "set datafile separator \",\"\n"
     << "set key autotitle columnhead\n"
     << "set title " << quoted(plot.title) << "\n"
     << "set xlabel " << quoted(plot.xlabel.empty() ? columns[static_cast<std::size_t>(plot.xcol - 1)] : plot.xlabel)
     << "\n";
  if (!plot.ylabel.empty()) os << "set ylabel " << quoted(plot.ylabel) << "\n";
  if (plot.logx) os << "set logscale x\n";
  if (plot.logy) os << "set logscale y\n";
  os << "set terminal pngcairo size 900,600\n"
     << "set output " << quoted(stem + ".png") << "\n"
     << "plot ";
  for (std::size_t i = 0; i < plot.ycols.size(); ++i) {
    if (!col_ok(plot.ycols[i])) throw ValidationError("plot y column out of range");
    os << (i ? ", \\\n     " : "") << (i ? "\"\"" : quoted(csv_name)) << " using " << plot.xcol << ":"
       << plot.ycols[i] << " with linespoints";
  }
  os << "\n";
  return os.str();
}

ReportWriter::ReportWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void ReportWriter::put(const std::string& name, const std::string& body) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw Error("cannot write '" + path.string() + "'");
  artifacts_.push_back(path.string());
}

void ReportWriter::table(const std::string& stem, const CsvTable& t, const json& header, const json& summary) {
  put(stem + ".csv", t.str());
  json side;
  side["header"] = header;
  side["summary"] = summary;
  side["columns"] = t.columns();
  side["table"] = stem + ".csv";
  put(stem + ".json", side.dump(2) + "\n");
}

void ReportWriter::plot(const std::string& stem, const CsvTable& t, const PlotSpec& plot) {
  put(stem + ".gp", gnuplot_script(stem + ".csv", t.columns(), plot));
}

void ReportWriter::document(const std::string& name, const json& doc) { put(name, doc.dump(2) + "\n"); }

void ReportWriter::text(const std::string& name, const std::string& body) { put(name, body); }

}  // namespace elab::lab
