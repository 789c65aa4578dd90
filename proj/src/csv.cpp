#include "pdflow/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdflow {

std::vector<std::string> trajectory_header(Eigen::Index n, Eigen::Index m) {
    std::vector<std::string> h{"t"};
    auto block = [&](const char* prefix, Eigen::Index k) {
        for (Eigen::Index i = 0; i < k; ++i) h.push_back(prefix + std::to_string(i));
    };
    block("x_", n);
    block("lam_", m);
    block("vx_", n);
    block("vlam_", m);
    for (const char* c : {"gap_xhat", "feas_xhat", "iterate_err", "vel_norm", "E", "E_eps", "dEdt"}) h.emplace_back(c);
    return h;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<DiagnosticsRecord>& records,
                          Eigen::Index n, Eigen::Index m) {
    if (records.size() != traj.samples.size()) throw std::invalid_argument("write_trajectory_csv: record count mismatch");
    write_row(os, trajectory_header(n, m));
    std::vector<std::string> cells;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const Vector& z = traj.samples[k].z;
        require_size(z, 2 * (n + m), "trajectory sample");
        const DiagnosticsRecord& r = records[k];
        cells.clear();
        cells.push_back(format_double(traj.samples[k].t));
        for (Eigen::Index i = 0; i < z.size(); ++i) cells.push_back(format_double(z[i]));
        for (double v : {r.gap_at_xhat, r.feasibility_at_xhat, r.iterate_error, r.velocity_norm, r.energy_E,
                         r.energy_E_eps, r.dE_dt_analytic}) {
            cells.push_back(format_double(v));
        }
        write_row(os, cells);
    }
}

void write_path_csv(std::ostream& os, const std::vector<PathPoint>& path, Eigen::Index n) {
    std::vector<std::string> h{"eps"};
    for (Eigen::Index i = 0; i < n; ++i) h.push_back("x_" + std::to_string(i));
    h.emplace_back("norm");
    h.emplace_back("residual");
    write_row(os, h);
    for (const PathPoint& p : path) {
        std::vector<std::string> cells{format_double(p.eps)};
        for (Eigen::Index i = 0; i < n; ++i) cells.push_back(format_double(p.x_eps[i]));
        cells.push_back(format_double(p.norm));
        cells.push_back(format_double(p.residual));
        write_row(os, cells);
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("CSV has no column '" + name + "'");
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    long lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        const std::vector<std::string> cells = split(line);
        if (cells.size() != t.header.size()) {
            throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size()) {
                throw std::runtime_error("CSV line " + std::to_string(lineno) + ": '" + c + "' is not a number");
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw std::runtime_error("CSV is empty");
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_csv(in);
}

}  // namespace pdflow
