#include "wlsreg/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wlsreg {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) {
        return false;
    }
    while (*end == ' ' || *end == '\t' || *end == '\r') {
        ++end;
    }
    return *end == '\0';
}

} // namespace

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open '" + path + "'");
    }
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], row[i])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            // a single non-numeric first row is treated as the header
            if (line_no == 1) {
                table.header = fields;
                width = fields.size();
                continue;
            }
            std::ostringstream msg;
            msg << path << ": line " << line_no << ": non-numeric field";
            throw CsvError(msg.str());
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            std::ostringstream msg;
            msg << path << ": line " << line_no << ": expected " << width
                << " fields, found " << row.size();
            throw CsvError(msg.str());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Dataset read_dataset_csv(const std::string& path) {
    const CsvTable table = read_csv_table(path);
    if (table.rows.empty()) {
        throw CsvError(path + ": no data rows");
    }
    const std::size_t cols = table.rows.front().size();
    if (cols < 1) {
        throw CsvError(path + ": need at least one column");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
    const Eigen::Index pc = static_cast<Eigen::Index>(cols) - 1;
    Eigen::MatrixXd carriers(n, pc);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < pc; ++j) {
            carriers(i, j) = row[static_cast<std::size_t>(j)];
        }
        y[i] = row[cols - 1];
    }
    return Dataset(std::move(carriers), std::move(y));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw CsvError("cannot write '" + path + "'");
    }
    if (!header.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            out << (i ? "," : "") << header[i];
        }
        out << '\n';
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << '\n';
    }
    if (!out) {
        throw CsvError("write failed for '" + path + "'");
    }
}

} // namespace wlsreg
