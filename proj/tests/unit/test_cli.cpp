#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "gbhe_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GBHE_CLI_PATH) + " " + args + " > " + (kWork / "stdout.txt").string() +
                          " 2> " + (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workdir {
  Workdir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Workdir() { fs::remove_all(kWork); }
};

}  // namespace

TEST_CASE("exit codes") {
  Workdir w;
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --config /nonexistent.ini") == 2);
  CHECK(run_cli("simulate --config " + write_config("bad.ini", "[model]\ngamma = 1.5\n").string()) == 2);
  CHECK(slurp(kWork / "stderr.txt").find("line 2") != std::string::npos);
  CHECK(run_cli("simulate --config " + write_config("spiral.ini", "[run]\ncase = Spiral\n").string()) == 2);

  const auto fail = write_config("fail.ini",
                                 "[run]\nmesh_n = 4\nt_final = 1\nn_steps = 1\n[model]\nbeta = 40\n"
                                 "[newton]\nmax_iterations = 1\n");
  CHECK(run_cli("simulate --config " + fail.string() + " --out " + (kWork / "o").string()) == 3);

  const auto ok = write_config("ok.ini", "[run]\nmesh_n = 4\nt_final = 0.25\nn_steps = 2\n");
  CHECK(run_cli("simulate --config " + ok.string() + " --out " + (kWork / "ok").string() + " --seed 9") == 0);
  CHECK(fs::exists(kWork / "ok" / "diagnostics.csv"));
  CHECK(slurp(kWork / "ok" / "diagnostics.csv").find("# seed: 9") != std::string::npos);
}

TEST_CASE("convergence subcommand") {
  Workdir w;
  const auto cfg = write_config("c.ini", "[run]\nt_final = 0.25\n[model]\neta = 1\n[convergence]\nlevels = 2 4 8 16\n");
  CHECK(run_cli("convergence --config " + cfg.string() + " --levels 3 --out " + (kWork / "a").string()) == 0);
  CHECK(run_cli("convergence --config " + cfg.string() + " --levels 3 --out " + (kWork / "b").string()) == 0);
  const std::string a = slurp(kWork / "a" / "convergence.csv");
  CHECK(a == slurp(kWork / "b" / "convergence.csv"));
  CHECK(a.find("# levels: 2 4 8") != std::string::npos);
  CHECK(run_cli("convergence --config " + cfg.string() + " --levels 2 --out " + (kWork / "c").string()) == 2);

  const auto caputo = write_config("cap.ini", "[run]\nt_final = 0.25\n[kernel]\ncaputo_order = 0.5\n[convergence]\nlevels = 2 4 8\n");
  CHECK(run_cli("convergence --config " + caputo.string() + " --out " + (kWork / "d").string()) == 0);
  CHECK(slurp(kWork / "d" / "convergence.csv").find("# caputo_weights: powerlaw") != std::string::npos);
  CHECK(slurp(kWork / "d" / "convergence.csv") != a);
}

TEST_CASE("weights-dump subcommand") {
  Workdir w;
  const auto cfg = write_config("w.ini", "[run]\nt_final = 1\nn_steps = 4\n[kernel]\nmu = 0.5\n");
  CHECK(run_cli("weights-dump --config " + cfg.string()) == 0);
  const std::string out = slurp(kWork / "stdout.txt");
  CHECK(out.find("k,j,omega,caputo_omega") != std::string::npos);
  // w_11 = (4/3) dt^-1/2 with dt = 1/4.
  CHECK(out.find("\n1,1,2.6666666666666") != std::string::npos);
  std::size_t rows = 0;
  std::istringstream in(out);
  for (std::string l; std::getline(in, l);) rows += !l.empty() && l[0] != '#';
  CHECK(rows == 1 + 10);
}
