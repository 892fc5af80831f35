#include <CLI11.hpp>
#include <iostream>

#include "mska/cli.hpp"
#include "mska/experiments.hpp"

namespace {

mska::RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  mska::RunConfig cfg = path.empty() ? mska::RunConfig{} : mska::parse_config_file(path);
  for (const auto& o : overrides) mska::apply_override(cfg, o);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multiscale kernel approximation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", overrides, "override entries as key=value")->take_all();
  };

  CLI::App* sub = app.add_subcommand("subsample", "select representative data sites");
  add_common(sub);
  CLI::App* solve = app.add_subcommand("solve", "run the full sparse regression pipeline");
  add_common(solve);
  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate stored coefficients");
  add_common(evaluate);

  CLI::App* runtest = app.add_subcommand("run-test", "desk-scale rerun of a reference experiment");
  std::string test_name;
  double scale = 0.1;
  uint64_t seed = 42;
  long long n_eval = 100000;
  std::string mesh_path, out_dir = "out";
  runtest->add_option("--test", test_name, "1A,1B,1C,2A,2B,2C,3 or 4")->required();
  runtest->add_option("--scale", scale, "problem size as a fraction of the reference runs");
  runtest->add_option("--seed", seed, "random seed");
  runtest->add_option("--n-eval", n_eval, "evaluation points");
  runtest->add_option("--mesh", mesh_path, "polygon mesh input (test 4)");
  runtest->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sub->parsed()) {
      mska::cmd_subsample(load_config(config_path, overrides));
    } else if (solve->parsed()) {
      mska::cmd_solve(load_config(config_path, overrides));
    } else if (evaluate->parsed()) {
      mska::cmd_evaluate(load_config(config_path, overrides));
    } else if (runtest->parsed()) {
      mska::TestCaseConfig tc;
      tc.name = test_name;
      tc.scale = scale;
      tc.seed = seed;
      tc.n_eval = static_cast<mska::Index>(n_eval);
      tc.mesh_path = mesh_path;
      tc.out_dir = out_dir;
      const auto reports = mska::run_test(tc);
      for (const auto& rep : reports) {
        std::cout << rep.label << ": |X_t| = " << rep.subsample_size
                  << ", rho = " << rep.separation << ", h = " << rep.fill << ", e2 = " << rep.e2;
        if (!rep.per_kernel.empty()) {
          std::cout << ", sparsity =";
          for (const auto& ks : rep.per_kernel) std::cout << " " << ks.active << "/" << ks.total;
        }
        std::cout << "\n";
      }
    }
  } catch (const mska::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const mska::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const mska::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
