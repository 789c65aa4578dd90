#pragma once

#include "pdflow/diagnostics.hpp"
#include "pdflow/integrator.hpp"
#include "pdflow/tikhonov_path.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace pdflow {

/// t, x_0..x_{n-1}, lam_0..lam_{m-1}, vx_*, vlam_*, gap_xhat, feas_xhat,
/// iterate_err, vel_norm, E, E_eps, dEdt
std::vector<std::string> trajectory_header(Eigen::Index n, Eigen::Index m);

/// 17 significant digits, so values parse back bit-for-bit.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<DiagnosticsRecord>& records,
                          Eigen::Index n, Eigen::Index m);

/// eps, x_0..x_{n-1}, norm, residual
void write_path_csv(std::ostream& os, const std::vector<PathPoint>& path, Eigen::Index n);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws std::out_of_range when absent.
    std::size_t column(const std::string& name) const;
};

/// Numeric CSV with one header line. Throws std::runtime_error with the line
/// number on malformed input.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

}  // namespace pdflow
