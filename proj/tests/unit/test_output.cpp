#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbhe/driver.hpp"
#include "gbhe/output.hpp"
#include "oracles.hpp"

using namespace gbhe;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gbhe_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
}

TEST_CASE("csv writer") {
  std::ostringstream out;
  CsvWriter csv(out, Metadata{{"config_hash", "00ff"}, {"scheme", "CR"}}, {"a", "b"});
  csv.row({1.0, 0.5});
  CHECK(out.str() == "# config_hash: 00ff\n# scheme: CR\na,b\n1,0.5\n");
  CHECK_THROWS_AS(csv.row({1.0}), std::invalid_argument);
}

TEST_CASE("metadata") {
  const RunConfig cfg = parse_config_string("[model]\neta = 1\n[kernel]\ncaputo_order = 0.5\n");
  const Metadata m = run_metadata(cfg);
  auto has = [&](const std::string& k) {
    for (const auto& [key, v] : m)
      if (key == k) return true;
    return false;
  };
  for (const char* k : {"config_hash", "scheme", "case", "nu", "alpha", "beta", "gamma", "delta", "eta", "penalty",
                        "quadrature", "memory_weights", "caputo_weights", "newton_tolerance"})
    CHECK(has(k));
}

TEST_CASE("snapshot schedule") {
  const TimeGrid g{1.0, 40};
  CHECK(snapshot_steps(g, 0.25).size() == 5);
  CHECK(snapshot_steps(g, 0.25) == std::vector<int>{0, 10, 20, 30, 40});
  CHECK(snapshot_steps(g, 0.3).size() == 4);
  CHECK(snapshot_steps(g, 0.0) == std::vector<int>{0, 40});
  const TimeGrid s{150.0, 150};
  CHECK(snapshot_steps(s, 25.0).size() == 7);
}

TEST_CASE("vtk files") {
  const auto dir = scratch("vtk");
  std::filesystem::create_directories(dir);
  for (SpaceKind kind : {SpaceKind::CR, SpaceKind::DG}) {
    const auto space = oracle::unit_space(2, kind);
    const auto u = interpolate(space, [](const Point& x) { return x.x + 2.0 * x.y; });
    const auto path = dir / (std::string(to_string(kind)) + ".vtk");
    write_vtk(path.string(), *space, u.values, u.values, 0.5, Metadata{{"config_hash", "abc"}});
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# vtk DataFile Version 3.0");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "ASCII");
    std::getline(in, line);
    CHECK(line == "DATASET UNSTRUCTURED_GRID");
    const std::string text = slurp(path);
    CHECK(text.find("POINTS 24 double") != std::string::npos);
    CHECK(text.find("CELLS 8 32") != std::string::npos);
    CHECK(text.find("CELL_TYPES 8") != std::string::npos);
    CHECK(text.find("POINT_DATA 24") != std::string::npos);
    CHECK(text.find("SCALARS u double 1") != std::string::npos);
    CHECK(text.find("SCALARS v double 1") != std::string::npos);
    CHECK((text.find("CELL_DATA 8") != std::string::npos) == (kind == SpaceKind::CR));
  }
  const Mesh m = generate_rect_mesh(Box{}, 2);
  write_vtk_mesh(m, (dir / "mesh.vtk").string());
  CHECK(slurp(dir / "mesh.vtk").find("CELL_TYPES 8") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence output is deterministic") {
  const RunConfig cfg = parse_config_string(
      "[run]\nscheme = DG\nt_final = 0.25\n[model]\neta = 1\n[convergence]\nlevels = 2 4 8\n");
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  std::ostringstream log;
  const auto rows = cmd_convergence(cfg, a.string(), std::nullopt, log);
  cmd_convergence(cfg, b.string(), std::nullopt, log);
  CHECK(rows.size() == 3);
  const std::string ca = slurp(a / "convergence.csv");
  CHECK(ca == slurp(b / "convergence.csv"));
  CHECK(ca.find("level,h,dt,dofs,errL2inf,errEnergy,rateL2,rateEnergy,newton_max") != std::string::npos);
  std::size_t data_lines = 0;
  std::istringstream in(ca);
  for (std::string l; std::getline(in, l);) data_lines += !l.empty() && l[0] != '#';
  CHECK(data_lines == 4);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("simulation output") {
  const RunConfig cfg = parse_config_string(
      "[run]\ncase = TypeI\nmesh_n = 4\nt_final = 0.5\nn_steps = 8\n[output]\nsnapshot_interval = 0.125\n");
  const auto dir = scratch("sim");
  std::ostringstream log;
  const auto traj = cmd_simulate(cfg, dir.string(), log);
  CHECK(traj.diagnostics.size() == 9);
  int vtk = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) vtk += e.path().extension() == ".vtk";
  CHECK(vtk == 5);
  CHECK(std::filesystem::exists(dir / "diagnostics.csv"));
  CHECK(std::filesystem::exists(dir / "stability.csv"));
  CHECK(slurp(dir / "diagnostics.csv").find("err_l2") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("traveling wave stays inside the physical range") {
  const RunConfig cfg = parse_config_string(
      "[run]\ncase = TravelingWave\nreynolds = 50\nmesh_n = 32\nt_final = 1\nn_steps = 32\n[output]\nvtk = false\n");
  const auto dir = scratch("tw");
  std::ostringstream log;
  const auto traj = cmd_simulate(cfg, dir.string(), log);
  const Space& s = *traj.space;
  double lo = 1e300;
  double hi = -1e300;
  for (std::size_t c = 0; c < s.mesh().num_cells(); ++c) {
    for (std::size_t i = 0; i < 3; ++i) {
      Barycentric l{0.0, 0.0, 0.0};
      l[i] = 1.0;
      const double v = s.evaluate(traj.u.back(), c, l);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK(lo >= -0.05);
  CHECK(hi <= 1.05);
  std::filesystem::remove_all(dir);
}

TEST_CASE("field statistics") {
  const auto space = oracle::unit_space(8, SpaceKind::DG);
  const auto u = interpolate(space, [](const Point& x) { return x.x; });
  const auto st = field_statistics(*space, u.values);
  CHECK(st.max_abs == doctest::Approx(1.0));
  CHECK(st.mean == doctest::Approx(0.5));
  CHECK(st.variance == doctest::Approx(1.0 / 12.0));
}
