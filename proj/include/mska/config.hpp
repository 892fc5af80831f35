#pragma once

#include <map>
#include <string>

#include "mska/types.hpp"

namespace mska {

/// Flat key-value run configuration with sectioned keys. Defaults follow the
/// reference parameter policy (rho = d, q+1 = 4, kappa = 1e-7, eta1 = 1e-3,
/// eta2 = 1e-1, Delta0 = 1, Delta_min = 1e-5, Delta_max = 1e3,
/// c_tau = c_nu = 0.05, p_tilde = 0.1, r0 = 10, gamma = 0.7).
struct RunConfig {
  std::string input_path;            // input.path
  std::string input_function = "";   // input.function: gauss4 | heterogeneous2d | phong
  Index input_n = 10000;             // input.n (synthetic sampling)
  Index dim = 2;                     // input.dim
  uint64_t seed = 42;                // seed
  std::string output_dir = "out";    // output.dir

  Index q_plus_1 = 4;                // moments.q_plus_1
  Index leaf_capacity = 0;           // tree.leaf_capacity, 0 = 2 m_q
  std::string split_rule = "median"; // tree.split

  Scalar rho = 0;                    // compression.rho, 0 = d
  Scalar kappa = 1e-7;               // compression.kappa

  std::string subsample_mode = "xprime";        // subsample.mode
  Scalar eps2 = 1e-7;                           // subsample.eps2
  std::string sub_kernel_family = "matern32";     // subsample.kernel.family
  std::string sub_kernel_lengthscale = "auto";    // auto (= bbox diagonal / 3) | sep | number

  std::string dict_family = "gaussian";  // dictionary.family
  Index dict_count = 1;                  // dictionary.L
  std::string dict_a = "h_t";            // dictionary.a: number or k*rho_t / k*h_t
  std::string dict_b = "2*h_t";          // dictionary.b
  std::string coordinates = "samplet";   // solve.coordinates: samplet | dirac

  Scalar tol = 1e-6;        // solver.tol
  Index maxit = 100;        // solver.maxit
  Scalar eta1 = 1e-3;       // solver.eta1
  Scalar eta2 = 1e-1;       // solver.eta2
  Scalar delta0 = 1.0;      // solver.delta0
  Scalar delta_min = 1e-5;  // solver.delta_min
  Scalar delta_max = 1e3;   // solver.delta_max
  Scalar c_tau = 0.05;      // solver.c_tau
  Scalar c_nu = 0.05;       // solver.c_nu
  Scalar p_tilde = 0.1;     // solver.p_tilde

  Scalar r0 = 10.0;      // continuation.r0
  Scalar gamma = 0.7;    // continuation.gamma
  Scalar r_min = 1e-5;   // continuation.r_min

  Index eval_n = 100000;  // evaluate.n
  Index eval_grid = 64;   // evaluate.grid
  bool export_matrix = false;  // solve.export_matrix

  /// Serialized as sorted "key = value" lines; parseable by parse_config.
  std::string echo() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Applies one "section.key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// All recognized keys, sorted (used in error messages).
std::vector<std::string> known_config_keys();

}  // namespace mska
