#include "gbhe/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gbhe/quadrature.hpp"

namespace gbhe {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Metadata run_metadata(const RunConfig& cfg) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash));
  const auto& p = cfg.params;
  const int nl = nonlinear_quadrature_degree(p.delta);
  Metadata m{
      {"config_hash", hash},
      {"scheme", to_string(cfg.scheme)},
      {"case", to_string(cfg.case_kind)},
      {"nu", format_number(p.nu)},
      {"alpha", format_number(p.alpha)},
      {"beta", format_number(p.beta)},
      {"gamma", format_number(p.reaction_gamma)},
      {"delta", std::to_string(p.delta)},
      {"eta", format_number(p.eta)},
      {"penalty", format_number(p.penalty_gamma)},
      {"t_final", format_number(cfg.t_final)},
      {"newton_tolerance", format_number(cfg.newton.tolerance)},
      {"newton_max_iterations", std::to_string(cfg.newton.max_iterations)},
      {"quadrature", "mass=2 load=5x3gauss-time nonlinear=" + std::to_string(nl) + " face_nonlinear=" +
                         std::to_string(nl) + " sipg_face=2 error=6"},
      {"memory_weights", p.eta > 0.0 ? cfg.kernel.formula_id() : "off"},
      {"caputo_weights", cfg.caputo_order ? KernelSpec::power_law(*cfg.caputo_order).formula_id() : "off"},
      {"errL2inf", "max over time nodes t_k of ||u_h^k - u(t_k)||_L2"},
  };
  if (cfg.case_kind == CaseKind::TravelingWave) m.emplace_back("reynolds", format_number(cfg.reynolds));
  if (cfg.fhn_eps) m.emplace_back("fhn_eps", format_number(*cfg.fhn_eps));
  if (cfg.seed) m.emplace_back("seed", std::to_string(*cfg.seed));
  if (cfg.fhn_rho) m.emplace_back("fhn_rho", format_number(*cfg.fhn_rho));
  return m;
}

CsvWriter::CsvWriter(std::ostream& out, const Metadata& meta, const std::vector<std::string>& columns)
    : out_(out), n_columns_(columns.size()) {
  for (const auto& [k, v] : meta) out_ << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_columns_) throw std::invalid_argument("CsvWriter::row: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

void write_vtk(const std::string& path, const Space& space, std::span<const double> u,
               std::optional<std::span<const double>> v, double time, const Metadata& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const Mesh& mesh = space.mesh();
  const std::size_t nc = mesh.num_cells();
  out << "# vtk DataFile Version 3.0\n";
  std::string title = "gbhe t=" + format_number(time);
  for (const auto& [k, val] : meta) {
    if (k == "config_hash" || k == "scheme") title += " " + k + "=" + val;
  }
  out << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * nc << " double\n";
  for (std::size_t c = 0; c < nc; ++c) {
    for (int vi : mesh.cells()[c]) {
      const Point& p = mesh.vertices()[static_cast<std::size_t>(vi)];
      out << format_number(p.x) << ' ' << format_number(p.y) << " 0\n";
    }
  }
  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << "3 " << 3 * c << ' ' << 3 * c + 1 << ' ' << 3 * c + 2 << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << "5\n";

  auto vertex_values = [&](std::span<const double> f, const std::string& name) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t i = 0; i < 3; ++i) {
        Barycentric lam{0.0, 0.0, 0.0};
        lam[i] = 1.0;
        out << format_number(space.evaluate(f, c, lam)) << '\n';
      }
    }
  };
  auto cell_averages = [&](std::span<const double> f, const std::string& name) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    const Barycentric centroid{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (std::size_t c = 0; c < nc; ++c) out << format_number(space.evaluate(f, c, centroid)) << '\n';
  };
  out << "POINT_DATA " << 3 * nc << '\n';
  vertex_values(u, "u");
  if (v) vertex_values(*v, "v");
  if (space.kind() == SpaceKind::CR) {
    out << "CELL_DATA " << nc << '\n';
    cell_averages(u, "u");
    if (v) cell_averages(*v, "v");
  }
}

}  // namespace gbhe
