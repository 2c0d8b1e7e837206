#pragma once

#include <map>
#include <string>
#include <vector>

#include "npd/diagnostics.hpp"

namespace npd {

/// Fixed column order of diagnostics files.
const std::vector<std::string>& diagnostics_csv_columns();
/// The header row, without a trailing newline.
std::string diagnostics_csv_header();
/// One row, every value printed with 17 significant digits. The identity
/// columns hold residuals relative to their largest term.
std::string diagnostics_csv_row(const diagnostics::DiagnosticsRecord& record);

/// Appends one row to `path`, writing the header first when the file is empty
/// or missing. Throws FormatError when an existing header differs.
void append_diagnostics(const diagnostics::DiagnosticsRecord& record, const std::string& path);

/// Column-oriented contents of a diagnostics (or any numeric) CSV file.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool has(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace npd
