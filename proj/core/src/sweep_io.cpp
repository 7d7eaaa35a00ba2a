#include "metaduct/io/sweep_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "metaduct/errors.hpp"

namespace metaduct::io {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::size_t column(const CsvTable& t, const std::string& name, const std::string& source) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw ValidationError(source + ": missing column " + name);
  return static_cast<std::size_t>(it - t.header.begin());
}

double cell_double(const CsvTable& t, std::size_t row, std::size_t col, const std::string& source) {
  const std::string& s = t.rows[row][col];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError(source + ":" + std::to_string(t.row_lines[row]) + ": column " + t.header[col] +
                          ": not a number: '" + s + "'");
  }
  return v;
}

long long cell_int(const CsvTable& t, std::size_t row, std::size_t col, const std::string& source) {
  const std::string& s = t.rows[row][col];
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError(source + ":" + std::to_string(t.row_lines[row]) + ": column " + t.header[col] +
                          ": not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      t.comments.push_back(trim(s.substr(1)));
      continue;
    }
    auto cells = split(s);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(source + ":" + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                            " columns, found " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.row_lines.push_back(n);
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  write_csv(out, table);
  if (!out) throw ValidationError("write failed for " + path);
}

std::vector<ScatteringData> sweep_from_table(const CsvTable& table, const std::string& source) {
  if (table.header.empty() || table.rows.empty()) throw ValidationError(source + ": no data rows");
  const std::size_t cf = column(table, "f_hz", source);
  const std::size_t ctr = column(table, "T_re", source);
  const std::size_t cti = column(table, "T_im", source);
  const std::size_t crr = column(table, "R_re", source);
  const std::size_t cri = column(table, "R_im", source);
  std::vector<ScatteringData> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ScatteringData d;
    d.f = cell_double(table, r, cf, source);
    d.T = {cell_double(table, r, ctr, source), cell_double(table, r, cti, source)};
    d.R = {cell_double(table, r, crr, source), cell_double(table, r, cri, source)};
    try {
      d.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(table.row_lines[r]) + ": " + e.what());
    }
    out.push_back(d);
  }
  return out;
}

CsvTable sweep_to_table(std::span<const ScatteringData> sweep, std::vector<std::string> comments) {
  CsvTable t;
  t.comments = std::move(comments);
  t.header = {"f_hz", "T_re", "T_im", "R_re", "R_im"};
  for (const auto& d : sweep) {
    t.rows.push_back({format_double(d.f), format_double(d.T.real()), format_double(d.T.imag()),
                      format_double(d.R.real()), format_double(d.R.imag())});
  }
  return t;
}

std::string flags_to_string(unsigned flags) {
  if (flags == 0) return "-";
  std::string s;
  const auto add = [&](unsigned bit, const char* name) {
    if (flags & bit) s += s.empty() ? name : std::string("|") + name;
  };
  add(kFlagDegenerate, "degenerate");
  add(kFlagInterpolated, "interpolated");
  add(kFlagAboveCutoff, "above_cutoff");
  add(kFlagUnwrapUndetermined, "unwrap_undetermined");
  return s;
}

CsvTable results_to_table(std::span<const RetrievedProperties> results, double z2, std::vector<std::string> comments) {
  CsvTable t;
  t.comments = std::move(comments);
  t.header = {"f_hz",          "n1_re",       "n1_im",          "z1_re",    "z1_im", "z1_over_z2_re",
              "z1_over_z2_im", "abs_z1_over_z2", "branch_m", "sign",     "cond_q", "residual",
              "coupling_change", "flags",     "flag_names"};
  for (const auto& r : results) {
    const cplx ratio = r.z1 / z2;
    t.rows.push_back({format_double(r.f), format_double(r.n1.real()), format_double(r.n1.imag()),
                      format_double(r.z1.real()), format_double(r.z1.imag()), format_double(ratio.real()),
                      format_double(ratio.imag()), format_double(std::abs(ratio)), std::to_string(r.m),
                      std::to_string(r.sign), format_double(r.condition), format_double(r.residual),
                      format_double(r.coupling_change), std::to_string(r.flags), flags_to_string(r.flags)});
  }
  return t;
}

std::vector<RetrievedProperties> results_from_table(const CsvTable& table, const std::string& source) {
  if (table.header.empty() || table.rows.empty()) throw ValidationError(source + ": no data rows");
  const auto c = [&](const char* name) { return column(table, name, source); };
  const std::size_t cf = c("f_hz"), cnr = c("n1_re"), cni = c("n1_im"), czr = c("z1_re"), czi = c("z1_im"),
                    cm = c("branch_m"), cs = c("sign"), ccond = c("cond_q"), cres = c("residual"),
                    ccc = c("coupling_change"), cfl = c("flags");
  std::vector<RetrievedProperties> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    RetrievedProperties p;
    p.f = cell_double(table, r, cf, source);
    p.n1 = {cell_double(table, r, cnr, source), cell_double(table, r, cni, source)};
    p.z1 = {cell_double(table, r, czr, source), cell_double(table, r, czi, source)};
    p.m = static_cast<int>(cell_int(table, r, cm, source));
    p.sign = static_cast<int>(cell_int(table, r, cs, source));
    p.condition = cell_double(table, r, ccond, source);
    p.residual = cell_double(table, r, cres, source);
    p.coupling_change = cell_double(table, r, ccc, source);
    p.flags = static_cast<unsigned>(cell_int(table, r, cfl, source));
    out.push_back(p);
  }
  return out;
}

}  // namespace metaduct::io
