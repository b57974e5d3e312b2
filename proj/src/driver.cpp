#include "gbhe/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gbhe/errors.hpp"
#include "gbhe/output.hpp"
#include "gbhe/quadrature.hpp"

namespace gbhe {

ManufacturedCase make_case(const RunConfig& cfg) {
  switch (cfg.case_kind) {
    case CaseKind::TypeI:
      return type_one();
    case CaseKind::TypeII:
      return type_two();
    case CaseKind::TravelingWave:
      return traveling_wave(cfg.reynolds);
    case CaseKind::Zero:
      return zero_case();
    case CaseKind::Spiral:
      break;
  }
  throw ConfigError(std::string("case ") + to_string(cfg.case_kind) + " has no exact solution");
}

Problem make_problem(const RunConfig& cfg) {
  auto mesh = std::make_shared<const Mesh>(generate_rect_mesh(cfg.domain, cfg.mesh_n));
  Problem p;
  p.space = std::make_shared<const Space>(mesh, cfg.scheme);
  p.params = cfg.params;
  p.kernel = cfg.kernel;
  p.caputo_order = cfg.caputo_order;
  p.grid = TimeGrid{cfg.t_final, cfg.steps()};
  p.newton = cfg.newton;
  if (cfg.case_kind == CaseKind::Spiral) {
    // Cross-field start: an excited left half and a refractory lower half.
    const double xm = 0.5 * (cfg.domain.xmin + cfg.domain.xmax);
    const double ym = 0.5 * (cfg.domain.ymin + cfg.domain.ymax);
    const double v0 = cfg.fhn_v_initial;
    p.initial = [xm](const Point& x) { return x.x < xm ? 1.0 : 0.0; };
    p.fhn = FhnParams{*cfg.fhn_eps, *cfg.fhn_rho, [ym, v0](const Point& x) { return x.y < ym ? v0 : 0.0; }};
    return p;
  }
  const ManufacturedCase mc = make_case(cfg);
  const auto exact = mc.u;
  p.initial = [exact](const Point& x) { return exact(x, 0.0); };
  if (cfg.case_kind != CaseKind::Zero) p.forcing = forcing(mc, cfg.params, cfg.kernel, cfg.caputo_order);
  if (!mc.homogeneous_boundary) p.dirichlet = exact;
  return p;
}

StudyConfig make_study(const RunConfig& cfg, std::optional<int> levels) {
  if (cfg.domain != Box{0.0, 0.0, 1.0, 1.0}) throw ConfigError("convergence studies run on the unit square");
  StudyConfig s;
  s.mcase = make_case(cfg);
  s.scheme = cfg.scheme;
  s.params = cfg.params;
  s.kernel = cfg.kernel;
  s.caputo_order = cfg.caputo_order;
  s.levels = cfg.levels;
  if (levels) {
    if (*levels < 1) throw ConfigError("--levels must be >= 1");
    s.levels.resize(static_cast<std::size_t>(std::min<int>(*levels, static_cast<int>(cfg.levels.size()))));
    while (static_cast<int>(s.levels.size()) < *levels) s.levels.push_back(2 * s.levels.back());
  }
  if (s.levels.size() < 3) throw ConfigError("a convergence study needs at least three levels");
  s.t_final = cfg.t_final;
  s.dt_ratio = cfg.dt_ratio;
  s.newton = cfg.newton;
  s.stability = s.mcase.homogeneous_boundary;
  return s;
}

std::vector<int> snapshot_steps(const TimeGrid& grid, double interval) {
  if (!(interval > 0.0)) return {0, grid.n_steps};
  const int count = static_cast<int>(std::floor(grid.t_final / interval + 1e-9)) + 1;
  std::vector<int> steps;
  for (int m = 0; m < count; ++m) {
    const int k = static_cast<int>(std::lround(m * interval / grid.delta_t()));
    steps.push_back(std::min(k, grid.n_steps));
  }
  return steps;
}

FieldStats field_statistics(const Space& space, std::span<const double> u) {
  FieldStats s;
  for (double x : u) s.max_abs = std::max(s.max_abs, std::abs(x));
  const auto& rule = triangle_rule(2);
  double area = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    for (std::size_t i = 0; i < 3; ++i) {
      Barycentric lam{0.0, 0.0, 0.0};
      lam[i] = 1.0;
      s.max_abs = std::max(s.max_abs, std::abs(space.evaluate(u, c, lam)));
    }
    const double det = 2.0 * space.cell(c).area;
    area += space.cell(c).area;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double v = space.evaluate(u, c, rule.points[q]);
      m1 += det * rule.weights[q] * v;
      m2 += det * rule.weights[q] * v * v;
    }
  }
  s.mean = m1 / area;
  s.variance = std::max(0.0, m2 / area - s.mean * s.mean);
  return s;
}

namespace {

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::vector<ConvergenceRow> cmd_convergence(const RunConfig& cfg, const std::string& out_dir,
                                            std::optional<int> levels, std::ostream& log) {
  const StudyConfig study = make_study(cfg, levels);
  auto out = open_output(out_dir, "convergence.csv");
  Metadata meta = run_metadata(cfg);
  std::string lv;
  for (int n : study.levels) lv += (lv.empty() ? "" : " ") + std::to_string(n);
  meta.emplace_back("levels", lv);
  meta.emplace_back("dt_ratio", format_number(study.dt_ratio));
  CsvWriter csv(out, meta,
                {"level", "h", "dt", "dofs", "errL2inf", "errEnergy", "rateL2", "rateEnergy", "newton_max"});
  return convergence_study(study, [&](const ConvergenceRow& r) {
    csv.row({static_cast<double>(r.level), r.h, r.dt, static_cast<double>(r.dofs), r.err_l2_inf, r.err_energy,
             r.rate_l2, r.rate_energy, static_cast<double>(r.newton_max)});
    out.flush();
    char buf[256];
    std::snprintf(buf, sizeof buf, "level %d  h=%.5g  dofs=%zu  errL2inf=%.6e  errEnergy=%.6e  rateEnergy=%.3f  newton_max=%d\n",
                  r.level, r.h, r.dofs, r.err_l2_inf, r.err_energy, r.rate_energy, r.newton_max);
    log << buf << std::flush;
  });
}

Trajectory cmd_simulate(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Problem problem = make_problem(cfg);
  const Space& space = *problem.space;
  const Metadata meta = run_metadata(cfg);
  const auto snaps = snapshot_steps(problem.grid, cfg.snapshot_interval);
  const bool exact = cfg.case_kind != CaseKind::Spiral;
  const ManufacturedCase mc = exact ? make_case(cfg) : zero_case();

  auto out = open_output(out_dir, "diagnostics.csv");
  std::vector<std::string> cols{"step", "time", "newton_iterations", "residual", "l2_norm", "gradient_norm", "energy",
                                "max_abs_u", "variance_u"};
  if (exact) cols.push_back("err_l2");
  CsvWriter csv(out, meta, cols);
  std::size_t next_snap = 0;
  int snap_id = 0;
  auto observer = [&](const TimeStepper& st, const StepDiagnostics& d) {
    const auto stats = field_statistics(space, st.current());
    std::vector<double> row{static_cast<double>(d.step), d.time, static_cast<double>(d.newton_iterations), d.residual,
                            d.l2_norm, d.gradient_norm, d.energy, stats.max_abs, stats.variance};
    if (exact) row.push_back(error_l2(space, st.current(), mc.u, d.time));
    csv.row(row);
    while (next_snap < snaps.size() && snaps[next_snap] == d.step) {
      if (cfg.write_vtk) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%04d.vtk", snap_id);
        std::optional<std::span<const double>> v;
        if (problem.fhn) v = std::span<const double>(st.current_v());
        write_vtk((std::filesystem::path(out_dir) / name).string(), space, st.current(), v, d.time, meta);
      }
      ++snap_id;
      ++next_snap;
    }
    if (d.step > 0 && (d.step % std::max(1, problem.grid.n_steps / 10) == 0 || d.step == problem.grid.n_steps)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "step %d/%d  t=%.6g  newton=%d  max|u|=%.4g\n", d.step, problem.grid.n_steps,
                    d.time, d.newton_iterations, stats.max_abs);
      log << buf << std::flush;
    }
  };
  const bool keep = exact && mc.homogeneous_boundary;
  Trajectory traj = run(problem, observer, keep);
  if (keep) {
    const auto rep = stability_check(traj, problem);
    auto s = open_output(out_dir, "stability.csv");
    CsvWriter sc(s, meta, {"lhs", "rhs", "holds"});
    sc.row({rep.lhs, rep.rhs, rep.holds ? 1.0 : 0.0});
  }
  return traj;
}

void cmd_weights_dump(const RunConfig& cfg, std::ostream& out) {
  const TimeGrid grid{cfg.t_final, cfg.steps()};
  const KernelWeights mem = memory_weights(cfg.kernel, grid.delta_t(), grid.n_steps);
  std::optional<KernelWeights> cap;
  if (cfg.caputo_order) cap = caputo_weights(*cfg.caputo_order, grid.delta_t(), grid.n_steps);
  Metadata meta = run_metadata(cfg);
  for (auto& [k, v] : meta) {
    if (k == "memory_weights") v = cfg.kernel.formula_id();
  }
  meta.emplace_back("dt", format_number(grid.delta_t()));
  CsvWriter csv(out, meta, {"k", "j", "omega", "caputo_omega"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= grid.n_steps; ++k) {
    for (int j = 1; j <= k; ++j) {
      csv.row({static_cast<double>(k), static_cast<double>(j), mem.at(k, j), cap ? cap->at(k, j) : nan});
    }
  }
}

}  // namespace gbhe
