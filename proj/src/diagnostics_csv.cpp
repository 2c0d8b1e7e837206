#include "npd/diagnostics_csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "npd/errors.hpp"

namespace npd {

const std::vector<std::string>& diagnostics_csv_columns() {
    static const std::vector<std::string> columns{
        "time",          "l2_rho",         "l2_sigma_dev",  "l3_rho",          "l4_rho",
        "l6_rho",        "linf_rho",       "linf_sigma_dev", "l2_grad_rho",    "l2_grad_sigma",
        "lr_grad_rho",   "l2_grad_phi",    "linf_grad_phi", "l2_u",            "lr_grad_u",
        "h2_rho",        "h2_sigma",       "h3_rho",        "h3_sigma",        "min_c1",
        "min_c2",        "mean_rho",       "mean_sigma",    "energy_residual", "lyapunov_residual"};
    return columns;
}

std::string diagnostics_csv_header() {
    std::string h;
    for (const auto& c : diagnostics_csv_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

std::string diagnostics_csv_row(const diagnostics::DiagnosticsRecord& r) {
    const double values[] = {r.time,
                             r.lp_rho[0],
                             r.lp_sigma_dev[0],
                             r.lp_rho[1],
                             r.lp_rho[2],
                             r.lp_rho[3],
                             r.lp_rho[4],
                             r.lp_sigma_dev[4],
                             r.l2_grad_rho,
                             r.l2_grad_sigma,
                             r.lr_grad_rho_max_r(),
                             r.l2_grad_phi,
                             r.linf_grad_phi,
                             r.l2_u,
                             r.lr_grad_u_max_r(),
                             r.h2_rho,
                             r.h2_sigma,
                             r.h3_rho,
                             r.h3_sigma,
                             r.min_c1,
                             r.min_c2,
                             r.mean_rho,
                             r.mean_sigma,
                             r.identities.energy_relative(),
                             r.identities.lyapunov_relative()};
    std::string row;
    char buf[40];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!row.empty()) row += ',';
        row += buf;
    }
    return row;
}

void append_diagnostics(const diagnostics::DiagnosticsRecord& record, const std::string& path) {
    bool write_header = true;
    {
        std::ifstream in(path);
        std::string first;
        if (in && std::getline(in, first)) {
            if (first != diagnostics_csv_header()) {
                throw FormatError(path + ": existing header does not match the diagnostics columns");
            }
            write_header = false;
        }
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw FormatError(path + ": cannot open for appending");
    if (write_header) out << diagnostics_csv_header() << '\n';
    out << diagnostics_csv_row(record) << '\n';
}

bool CsvTable::has(const std::string& name) const {
    for (const auto& c : columns) {
        if (c == name) return true;
    }
    return false;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] != name) continue;
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(row[j]);
        return out;
    }
    throw FormatError("no column named " + name);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw FormatError(path + ":" + std::to_string(lineno) + ": not a number: " + cell);
            }
            row.push_back(v);
        }
        if (row.size() != t.columns.size()) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                              " values, found " + std::to_string(row.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace npd
