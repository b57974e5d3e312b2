#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbhe/geometry.hpp"
#include "gbhe/kernel.hpp"
#include "gbhe/solver.hpp"

namespace gbhe {

enum class CaseKind { TypeI, TypeII, TravelingWave, Spiral, Zero };

const char* to_string(CaseKind kind);

/// Validated run description; see docs/config.md for the file grammar.
struct RunConfig {
  SpaceKind scheme = SpaceKind::CR;
  CaseKind case_kind = CaseKind::TypeI;
  double reynolds = 50.0;
  int mesh_n = 16;
  Box domain{0.0, 0.0, 1.0, 1.0};
  double t_final = 1.0;
  std::optional<int> n_steps;
  std::optional<double> dt;

  ModelParams params;
  KernelSpec kernel = KernelSpec::power_law(0.5);
  std::optional<double> caputo_order;

  std::vector<int> levels{8, 16, 32, 64};
  double dt_ratio = 0.25;

  NewtonOptions newton;

  std::optional<double> fhn_eps;
  std::optional<double> fhn_rho;
  double fhn_v_initial = 0.1;  // v on the lower half of the domain at t = 0 (spiral case)

  double snapshot_interval = 0.0;  // 0: the whole run is one interval
  bool write_vtk = true;

  std::optional<std::uint64_t> seed;  // set by the command line, echoed into metadata

  std::string source;        // normalized text the hash is computed from
  std::uint64_t hash = 0;    // FNV-1a of `source`

  /// Number of steps of a single simulation.
  int steps() const;
};

/// Throws ConfigError (with the 1-based line number when applicable).
RunConfig parse_config_string(const std::string& text);
RunConfig parse_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& data);

}  // namespace gbhe
