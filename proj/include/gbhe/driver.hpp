#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gbhe/config.hpp"
#include "gbhe/mms.hpp"
#include "gbhe/solver.hpp"

namespace gbhe {

/// Exact solution of a manufactured case; throws ConfigError for cases without one.
ManufacturedCase make_case(const RunConfig& cfg);

/// Single-simulation problem on cfg.domain with cfg.mesh_n cells per side.
Problem make_problem(const RunConfig& cfg);

/// Study over cfg.levels (optionally truncated or extended by doubling to `levels` entries).
StudyConfig make_study(const RunConfig& cfg, std::optional<int> levels = std::nullopt);

/// Steps written as snapshots: floor(T / interval) + 1 of them (interval 0 means [0, N]).
std::vector<int> snapshot_steps(const TimeGrid& grid, double interval);

struct FieldStats {
  double max_abs = 0.0;  // over dof values and cell vertex values
  double mean = 0.0;
  double variance = 0.0;  // spatial: |Omega|^-1 int (u - mean)^2
};
FieldStats field_statistics(const Space& space, std::span<const double> u);

/// Writes convergence.csv into out_dir; returns the rows.
std::vector<ConvergenceRow> cmd_convergence(const RunConfig& cfg, const std::string& out_dir,
                                            std::optional<int> levels, std::ostream& log);

/// Writes diagnostics.csv and snapshot_XXXX.vtk files into out_dir.
Trajectory cmd_simulate(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Prints the memory (and Caputo) weight table for the run's time grid as CSV.
void cmd_weights_dump(const RunConfig& cfg, std::ostream& out);

}  // namespace gbhe
