#include <doctest.h>

#include <filesystem>

#include "gbhe/config.hpp"
#include "gbhe/errors.hpp"

using namespace gbhe;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config_string("[run]\nscheme = DG\n");
  CHECK(c.scheme == SpaceKind::DG);
  CHECK(c.params.penalty_gamma == 40.0);
  CHECK(c.newton.tolerance == 1e-10);
  CHECK(c.newton.max_iterations == 25);
  CHECK(c.newton.linear_solver == LinearSolverKind::SparseLU);
  CHECK(c.params.nu == 1.0);
  CHECK(c.params.alpha == 1.0);
  CHECK(c.params.beta == 1.0);
  CHECK(c.params.reaction_gamma == 0.5);
  CHECK(c.params.delta == 1);
  CHECK(c.kernel.kind == KernelKind::PowerLaw);
  CHECK(c.kernel.mu == 0.5);
  CHECK_FALSE(c.caputo_order.has_value());
  CHECK(c.levels == std::vector<int>{8, 16, 32, 64});
  CHECK(parse_config_string("").case_kind == CaseKind::TypeI);
}

TEST_CASE("values are parsed") {
  const RunConfig c = parse_config_string(R"(
# comment
[run]
case = TravelingWave   # trailing comment
reynolds = 100
mesh_n = 12
domain = 0, 0, 2, 1
t_final = 0.5
n_steps = 10
[model]
eta = 1
delta = 2
[kernel]
mu = 0.25
caputo_order = 0.5
[convergence]
levels = 4 8 16
[newton]
linear_solver = gmres
max_iterations = 7
[output]
vtk = no
)");
  CHECK(c.case_kind == CaseKind::TravelingWave);
  CHECK(c.params.nu == doctest::Approx(0.01));
  CHECK(c.domain == Box{0.0, 0.0, 2.0, 1.0});
  CHECK(c.steps() == 10);
  CHECK(c.params.delta == 2);
  CHECK(c.kernel.mu == 0.25);
  CHECK(*c.caputo_order == 0.5);
  CHECK(c.levels == std::vector<int>{4, 8, 16});
  CHECK(c.newton.linear_solver == LinearSolverKind::Gmres);
  CHECK(c.newton.max_iterations == 7);
  CHECK_FALSE(c.write_vtk);

  const RunConfig w = parse_config_string("[run]\ncase = TravelingWave\n[model]\nnu = 0.5\n");
  CHECK(w.params.nu == 0.5);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(parse_config_string("[model]\ngamma = 1.5\n"), ConfigError);
  CHECK(error_line("[model]\ngamma = 1.5\n") == 2);
  CHECK_THROWS_AS(parse_config_string("[kernel]\nmu = 1.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[kernel]\ncaputo_order = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[run]\ncase = Spiral\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[run]\ncase = Spiral\n[fhn]\neps = 0.1\n"), ConfigError);
  CHECK_NOTHROW(parse_config_string("[run]\ncase = Spiral\n[fhn]\neps = 0.1\nrho = 0.5\n"));
  CHECK(error_line("[run]\nscheme = CR\n\n[model]\nbogus = 3\n") == 5);
  CHECK(error_line("[nope]\n") == 1);
  CHECK(error_line("[run]\nt_final = 1\nt_final = 2\n") == 3);
  CHECK(error_line("scheme = CR\n") == 1);
  CHECK(error_line("[run]\nmesh_n = 3.5\n") == 2);
  CHECK(error_line("[model]\nnu = 1x\n") == 2);
  CHECK(error_line("[run]\nscheme CR\n") == 2);
  CHECK_THROWS_AS(parse_config_string("[model]\nnu = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[model]\ndelta = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[convergence]\nlevels = 4 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[run]\nn_steps = 4\ndt = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("hash ignores layout") {
  const auto a = parse_config_string("[run]\nscheme = CR\nt_final = 1\n");
  const auto b = parse_config_string("# note\n[RUN]\n  t_final=1   \n\nscheme=CR # x\n");
  const auto c = parse_config_string("[run]\nscheme = CR\nt_final = 2\n");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("shipped configurations parse") {
  const std::filesystem::path dir = GBHE_SOURCE_DIR "/configs";
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".ini") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(parse_config(e.path().string()));
    ++count;
  }
  CHECK(count >= 5);
}
