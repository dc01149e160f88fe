#pragma once

#include <string>
#include <vector>

#include "wlsreg/dataset.hpp"

namespace wlsreg {

// Malformed CSV input; the message names the offending line number.
struct CsvError : std::runtime_error {
    explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

struct CsvTable {
    std::vector<std::string> header; // empty when the file has no header row
    std::vector<std::vector<double>> rows;
};

// Comma-separated, decimal point, UTF-8. A single header row is auto-detected
// (first row with any non-numeric field). Throws CsvError for ragged or
// non-numeric data rows.
CsvTable read_csv_table(const std::string& path);

// Last column is the response y, preceding columns are carriers.
Dataset read_dataset_csv(const std::string& path);

// Full-precision (17 significant digits) formatting; round-trips doubles.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

} // namespace wlsreg
