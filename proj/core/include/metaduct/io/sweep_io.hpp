#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "metaduct/retrieval.hpp"
#include "metaduct/types.hpp"

namespace metaduct::io {

// %.17g: reading the text back gives the same double.
std::string format_double(double v);

// A CSV table: '#' lines are comments, the first other line is the header.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row
};

// Throws ValidationError with source:line on ragged rows.
CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

// Sweep files: f_hz, T_re, T_im, R_re, R_im (any column order, extra
// columns ignored). Throws "no data rows" for an empty table.
std::vector<ScatteringData> sweep_from_table(const CsvTable& table, const std::string& source);
CsvTable sweep_to_table(std::span<const ScatteringData> sweep, std::vector<std::string> comments = {});

// Results files: one row per frequency of retrieve_sweep output.
CsvTable results_to_table(std::span<const RetrievedProperties> results, double z2,
                          std::vector<std::string> comments = {});
std::vector<RetrievedProperties> results_from_table(const CsvTable& table, const std::string& source);

std::string flags_to_string(unsigned flags);

}  // namespace metaduct::io
