#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::string cli() { return MSKA_CLI_PATH; }

int run(const std::string& args) {
  const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_config(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

}  // namespace

TEST_CASE("subsample command is deterministic and sweeps monotonically") {
  const fs::path dir = fresh_dir("mska_cli_subsample");
  const fs::path cfg = dir / "run.cfg";

  std::vector<long> counts;
  for (const char* eps2 : {"1e-4", "1e-7", "1e-10"}) {
    write_config(cfg, std::string("input.function = heterogeneous2d\n") +
                          "input.n = 8000\n"
                          "seed = 7\n"
                          "subsample.eps2 = " +
                          eps2 + "\noutput.dir = " + (dir / eps2).string() + "\n");
    REQUIRE(run("subsample --config " + cfg.string()) == 0);
    std::ifstream stats(dir / eps2 / "subsample_stats.csv");
    std::string header, row;
    std::getline(stats, header);
    std::getline(stats, row);
    counts.push_back(std::strtol(row.c_str(), nullptr, 10));
  }
  // |X_t| is nondecreasing as eps2 decreases
  CHECK(counts[0] <= counts[1]);
  CHECK(counts[1] <= counts[2]);

  // byte-identical rerun
  const std::string before = slurp(dir / "1e-7" / "subsample_indices.csv");
  REQUIRE(run("subsample --config " + cfg.string() + " --set subsample.eps2=1e-7 --set output.dir=" +
              (dir / "1e-7").string()) == 0);
  CHECK(slurp(dir / "1e-7" / "subsample_indices.csv") == before);
  fs::remove_all(dir);
}

TEST_CASE("empty input file yields a structured data error") {
  const fs::path dir = fresh_dir("mska_cli_empty");
  write_config(dir / "empty.csv", "");
  write_config(dir / "run.cfg", "input.path = " + (dir / "empty.csv").string() +
                                    "\noutput.dir = " + (dir / "out").string() + "\n");
  CHECK(run("subsample --config " + (dir / "run.cfg").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("invalid config key exits with usage error") {
  const fs::path dir = fresh_dir("mska_cli_badkey");
  write_config(dir / "run.cfg", "solver.bogus = 1\n");
  CHECK(run("subsample --config " + (dir / "run.cfg").string()) == 1);
  CHECK(run("nonexistent-command") == 1);
  fs::remove_all(dir);
}

TEST_CASE("solve smoke problem converges quickly and reruns byte-identically") {
  const fs::path dir = fresh_dir("mska_cli_solve");
  const fs::path out = dir / "out";
  write_config(dir / "run.cfg",
               "input.function = gauss4\n"
               "input.n = 500\n"
               "seed = 3\n"
               "subsample.eps2 = 1e-6\n"
               "dictionary.family = gaussian\n"
               "dictionary.L = 2\n"
               "dictionary.a = rho_t\n"
               "dictionary.b = 2*h_t\n"
               "solver.maxit = 60\n"
               "continuation.r_min = 1e-3\n"
               "evaluate.n = 2000\n"
               "output.dir = " +
                   out.string() + "\n");

  const auto t0 = std::chrono::steady_clock::now();
  REQUIRE(run("solve --config " + (dir / "run.cfg").string()) == 0);
  const auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(elapsed < 5.0);

  CHECK(fs::exists(out / "coefficients.csv"));
  CHECK(fs::exists(out / "sparsity.csv"));
  CHECK(fs::exists(out / "solver_report.csv"));
  CHECK(fs::exists(out / "effective_config.txt"));

  const std::string coeff = slurp(out / "coefficients.csv");
  const std::string report = slurp(out / "solver_report.csv");
  REQUIRE(run("solve --config " + (dir / "run.cfg").string()) == 0);
  CHECK(slurp(out / "coefficients.csv") == coeff);
  CHECK(slurp(out / "solver_report.csv") == report);

  // evaluate consumes the artifacts and is itself deterministic
  REQUIRE(run("evaluate --config " + (dir / "run.cfg").string()) == 0);
  const std::string err_report = slurp(out / "error_report.csv");
  const std::string grid = slurp(out / "reconstruction_grid.csv");
  CHECK(!err_report.empty());
  REQUIRE(run("evaluate --config " + (dir / "run.cfg").string()) == 0);
  CHECK(slurp(out / "error_report.csv") == err_report);
  CHECK(slurp(out / "reconstruction_grid.csv") == grid);
  fs::remove_all(dir);
}

TEST_CASE("evaluate without coefficients is a data error") {
  const fs::path dir = fresh_dir("mska_cli_eval_missing");
  write_config(dir / "run.cfg", "input.function = gauss4\ninput.n = 200\nevaluate.n = 100\n"
                                "output.dir = " +
                                    (dir / "out").string() + "\n");
  CHECK(run("evaluate --config " + (dir / "run.cfg").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("config echo can be replayed as a config file") {
  const fs::path dir = fresh_dir("mska_cli_echo");
  const fs::path out = dir / "out";
  write_config(dir / "run.cfg", "input.function = gauss4\ninput.n = 400\nsubsample.eps2 = 1e-5\n"
                                "output.dir = " +
                                    out.string() + "\n");
  REQUIRE(run("subsample --config " + (dir / "run.cfg").string()) == 0);
  const std::string stats = slurp(out / "subsample_stats.csv");
  REQUIRE(run("subsample --config " + (out / "effective_config.txt").string()) == 0);
  CHECK(slurp(out / "subsample_stats.csv") == stats);
  fs::remove_all(dir);
}
