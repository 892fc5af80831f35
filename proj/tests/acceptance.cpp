// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Scales and tolerances are fixed here, not configurable.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "mska/cli.hpp"
#include "mska/compression.hpp"
#include "mska/experiments.hpp"
#include "mska/lasso.hpp"
#include "mska/metrics.hpp"
#include "mska/monomials.hpp"
#include "mska/subsample.hpp"
#include "mska/test_functions.hpp"
#include "../tests/oracles.hpp"

using namespace mska;

namespace {

int failures = 0;

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int id, bool pass, const std::string& what, double seconds) {
  std::printf("[%s] criterion %2d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Basis2d {
  std::shared_ptr<ClusterTree> tree;
  std::shared_ptr<SampletBasis> basis;
  Matrix points;
};

Basis2d make_basis(Index n, uint64_t seed) {
  Basis2d b;
  b.points = oracles::random_points(n, 2, seed);
  auto [tree, perm] = build_cluster_tree(PointSet(b.points), 20);
  b.tree = std::make_shared<ClusterTree>(std::move(tree));
  b.basis =
      std::make_shared<SampletBasis>(compute_samplet_basis(*b.tree, make_moment_spec(3, 2)));
  return b;
}

// 1 & 2: dense-transform orthonormality and per-samplet vanishing moments.
void criteria_1_2() {
  double t0 = now();
  const Basis2d b = make_basis(4096, 101);
  const Matrix t = b.basis->dense_transform();
  const Scalar ortho =
      (t * t.transpose() - Matrix::Identity(4096, 4096)).norm();
  const double t1 = now();
  {
    std::ostringstream oss;
    oss << "samplet orthonormality ||TT^t - I||_F = " << ortho << " <= 1e-10";
    report(1, ortho <= 1e-10 && t1 - t0 < 30.0, oss.str(), t1 - t0);
  }

  double t2 = now();
  const auto exps = monomial_exponents(3, 2);
  Matrix mono(4096, static_cast<Index>(exps.size()));
  Vector mono_max(static_cast<Index>(exps.size()));
  for (std::size_t a = 0; a < exps.size(); ++a) {
    for (Index i = 0; i < 4096; ++i)
      mono(i, static_cast<Index>(a)) =
          std::pow(b.points(i, 0), exps[a][0]) * std::pow(b.points(i, 1), exps[a][1]);
    mono_max[static_cast<Index>(a)] = mono.col(static_cast<Index>(a)).cwiseAbs().maxCoeff();
  }
  // row g of T holds the coefficients of samplet g in original point order
  const Matrix moments = t * mono;
  Scalar worst = 0;
  for (Index g = 0; g < b.basis->size(); ++g) {
    if (b.basis->level_of(g) < 1) continue;
    const Scalar rownorm = t.row(g).norm();
    for (Index a = 0; a < moments.cols(); ++a)
      worst = std::max(worst,
                       std::abs(moments(g, a)) / (rownorm * std::max(mono_max[a], Scalar(1))));
  }
  const double t3 = now();
  std::ostringstream oss;
  oss << "vanishing moments up to degree 3, worst residual " << worst << " <= 1e-10";
  report(2, worst <= 1e-10, oss.str(), t3 - t2);
}

// 3: a cubic sampled at 1e5 points has no significant coefficients at j >= 1.
void criterion_3() {
  const double t0 = now();
  const Basis2d b = make_basis(100000, 102);
  Vector h(100000);
  for (Index i = 0; i < h.size(); ++i) {
    const Scalar x = b.points(i, 0), y = b.points(i, 1);
    h[i] = 0.7 - 1.3 * x + 0.9 * y + 2.0 * x * y - x * x + 0.5 * y * y + 0.3 * x * x * x -
           0.8 * x * x * y + 0.2 * x * y * y - 0.6 * y * y * y;
  }
  const Vector hsig = b.basis->forward(h);
  const Scalar cutoff = 1e-10 * hsig.cwiseAbs().maxCoeff();
  Index significant = 0, fine = 0;
  for (Index g = 0; g < hsig.size(); ++g) {
    if (b.basis->level_of(g) < 1) continue;
    ++fine;
    if (std::abs(hsig[g]) > cutoff) ++significant;
  }
  std::ostringstream oss;
  oss << "polynomial sparsification: " << significant << " of " << fine
      << " fine-level coefficients above 1e-10 * ||h^S||_inf";
  report(3, significant == 0, oss.str(), now() - t0);
}

// 4: compression fidelity and nnz scaling for Matern-3/2.
void criterion_4() {
  const double t0 = now();
  const KernelModel model{KernelFamily::Matern32, 1.0};
  const CompressionConfig cfg{2.0, 1e-7};

  bool pass = true;
  std::ostringstream oss;

  // (a) Frobenius error against the dense transformed matrix at N = 4096
  {
    const Basis2d b = make_basis(4096, 103);
    const SparseMatrix ks = assemble_compressed_square(*b.basis, model, cfg);
    const Matrix t = b.basis->dense_transform();
    const Matrix kernel = assemble_dense_block(b.points, model, b.points);
    const Matrix full = t * kernel * t.transpose();
    const Scalar err = (ks.to_dense() - full).norm() / full.norm();
    oss << "compression error " << err << " <= 1e-4";
    pass = pass && err <= 1e-4;
  }

  // (b) nnz / (N log2 N) of the admissibility pattern stays within a 2x band
  // over the sweep; the a-posteriori threshold only prunes further.
  Scalar ratio_min = 1e300, ratio_max = 0;
  for (Index n : {4096, 8192, 16384}) {
    const Basis2d b = make_basis(n, 104);
    const SparseMatrix ks = assemble_compressed_square(*b.basis, model, {cfg.rho, 0.0});
    const Scalar ratio = Scalar(ks.nnz()) / (Scalar(n) * std::log2(Scalar(n)));
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  oss << ", nnz/(N log2 N) in [" << ratio_min << ", " << ratio_max << "]";
  pass = pass && ratio_max <= 2.0 * ratio_min;
  const double elapsed = now() - t0;
  pass = pass && elapsed < 300.0;
  report(4, pass, oss.str(), elapsed);
}

// 5: energy localization identities at N = 1e4.
void criterion_5() {
  const double t0 = now();
  const Basis2d b = make_basis(10000, 105);
  const Vector h = oracles::random_vector(10000, 106);
  const Vector hsig = b.basis->forward(h);

  const EnergyTree ex = compute_energies(*b.basis, hsig, EnergyMode::Xprime);
  const Scalar xerr = std::abs(ex.total() - hsig.squaredNorm()) / hsig.squaredNorm();

  const SparseMatrix ks =
      assemble_compressed_square(*b.basis, {KernelFamily::Exponential, 0.3}, {2.0, 1e-7});
  const Vector z = ks.multiply(hsig);
  const LumpedDiagonal d = make_lumped_diagonal(hsig, z);
  const EnergyTree eh = compute_energies(*b.basis, hsig, EnergyMode::Hprime, &d);
  const Scalar quad = hsig.dot(z);
  const Scalar herr = std::abs(eh.total() - quad) / std::abs(quad);

  std::ostringstream oss;
  oss << "energy localization: X' rel err " << xerr << ", H' rel err " << herr << " <= 1e-10";
  report(5, xerr <= 1e-10 && herr <= 1e-10, oss.str(), now() - t0);
}

// 6: subsample trends on the heterogeneous function at N = 3e4.
void criterion_6() {
  const double t0 = now();
  const Dataset ds = make_function_dataset("heterogeneous2d", 30000, 10, 42);

  auto counts_for = [&](const std::string& mode) {
    std::vector<Index> counts;
    for (Scalar eps2 : {1e-4, 1e-7, 1e-10}) {
      RunConfig cfg;
      cfg.input_function = "heterogeneous2d";
      cfg.subsample_mode = mode;
      cfg.eps2 = eps2;
      const SubsampleResult sub = run_subsample(ds.points, ds.values, cfg);
      counts.push_back(sub.subsample.points.rows());
    }
    return counts;
  };
  const std::vector<Index> xp = counts_for("xprime");
  const std::vector<Index> hp = counts_for("hprime");

  const bool x_strict = xp[0] < xp[1] && xp[1] < xp[2];
  const bool h_below = hp[0] < xp[0] && hp[1] < xp[1] && hp[2] < xp[2];
  const bool h_saturates = Scalar(hp[2]) <= 1.1 * Scalar(hp[1]);
  std::ostringstream oss;
  oss << "subsample trends: X' " << xp[0] << "/" << xp[1] << "/" << xp[2] << ", H' " << hp[0]
      << "/" << hp[1] << "/" << hp[2];
  report(6, x_strict && h_below && h_saturates, oss.str(), now() - t0);
}

// 7: online SVD equivalence with the batch SVD.
void criterion_7() {
  const double t0 = now();
  const Matrix full = oracles::random_gaussian(300, 50, 107);
  OnlineSVD svd;
  for (Index batch = 0; batch < 10; ++batch) {
    std::vector<Index> ids;
    for (Index j = 0; j < 5; ++j) ids.push_back(batch * 5 + j);
    svd.append_columns(full.middleCols(batch * 5, 5), ids);
  }
  const Vector batch_s = Eigen::BDCSVD<Matrix>(full).singularValues();
  Scalar sv_err = 0;
  for (Index i = 0; i < batch_s.size(); ++i)
    sv_err = std::max(sv_err, std::abs(svd.singular_values()[i] - batch_s[i]) / batch_s[0]);
  const Scalar rec_err = (svd.reconstruct() - full).norm() / full.norm();
  std::ostringstream oss;
  oss << "online SVD: singular value err " << sv_err << ", reconstruction err " << rec_err
      << " <= 1e-8";
  report(7, sv_err <= 1e-8 && rec_err <= 1e-8, oss.str(), now() - t0);
}

// 8: TR-SSN correctness (closed form, ISTA oracle, KKT, residual).
void criterion_8() {
  const double t0 = now();
  bool pass = true;
  std::ostringstream oss;

  {  // (a) orthogonal design
    const Matrix q =
        Eigen::HouseholderQR<Matrix>(oracles::random_gaussian(120, 80, 108)).householderQ() *
        Matrix::Identity(120, 80);
    const Vector h = oracles::random_vector(120, 109);
    const Vector w = Vector::Constant(80, 0.05);
    LassoProblem p;
    p.op = LinOp(q);
    p.h = h;
    p.w = w;
    p.lipschitz = 1.0;
    p.lambda = 2.0;
    TrssnConfig cfg;
    cfg.tol = 1e-10;
    cfg.maxit = 300;
    auto [alpha, rep] = tr_ssn(p, p.lambda * p.op.apply_t(h), cfg);
    const Scalar err = (alpha - soft_shrinkage(q.transpose() * h, w)).cwiseAbs().maxCoeff();
    oss << "orthogonal-design err " << err;
    pass = pass && err <= 1e-8;
  }

  {  // (b)-(d) 50 seeded random problems
    Scalar worst_obj_gap = 0, worst_fnor = 0;
    bool kkt_all = true;
    for (uint64_t seed = 0; seed < 50; ++seed) {
      const Matrix k = oracles::random_gaussian(120, 80, 110 + seed);
      const Vector h = oracles::random_vector(120, 200 + seed);
      const Vector w = Vector::Constant(80, 1.0 / std::sqrt(80.0));
      LassoProblem p;
      const Scalar smax = Eigen::BDCSVD<Matrix>(k).singularValues()[0];
      p.lipschitz = smax * smax;
      p.lambda = 2.0 / p.lipschitz;
      p.op = LinOp(k);
      p.h = h;
      p.w = w;
      TrssnConfig cfg;
      cfg.tol = 1e-8;
      cfg.maxit = 600;
      auto [alpha, rep] = tr_ssn(p, p.lambda * p.op.apply_t(h), cfg);
      worst_fnor = std::max(worst_fnor, rep.final_fnor);
      const Vector ista = oracles::ista_solve(k, h, w, 1e-10);
      worst_obj_gap =
          std::max(worst_obj_gap, std::abs(objective(p, alpha) - objective(p, ista)));
      kkt_all = kkt_all && oracles::kkt_holds(k, h, w, alpha, 1e-6);
    }
    oss << ", max objective gap " << worst_obj_gap << ", max ||F_nor|| " << worst_fnor
        << ", KKT " << (kkt_all ? "ok" : "violated");
    pass = pass && worst_obj_gap <= 1e-6 && worst_fnor <= 1e-8 && kkt_all;
  }
  const double elapsed = now() - t0;
  pass = pass && elapsed < 120.0;
  report(8, pass, oss.str(), elapsed);
}

// 9: desk-scale multiscale regression rerun (single vs multi kernel).
void criterion_9() {
  const double t0 = now();
  TestCaseConfig single;
  single.name = "2B";
  single.scale = 0.1;  // N = 1e5
  single.n_eval = 100000;
  TestCaseConfig multi = single;
  multi.name = "2C";

  const auto rep_single = run_test(single);
  const auto rep_multi = run_test(multi);
  const Scalar e_single = rep_single[0].e2;
  const Scalar e_multi = rep_multi[0].e2;
  std::ostringstream oss;
  oss << "multiscale rerun: single-kernel e2 " << e_single << ", multi-kernel e2 " << e_multi;
  const double elapsed = now() - t0;
  report(9, e_multi <= 1e-4 && e_multi <= 0.1 * e_single && elapsed < 900.0, oss.str(),
         elapsed);
}

// 10: residual isometry between coordinate systems without dropping.
void criterion_10() {
  const double t0 = now();
  const Basis2d b = make_basis(2048, 111);
  const KernelModel model{KernelFamily::Gaussian, 0.4};
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const SparseMatrix ksig = assemble_compressed_square(*b.basis, model, {inf, 0.0});

  Scalar worst = 0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Vector alpha = oracles::random_vector(2048, 112 + seed);
    const Vector h = oracles::random_vector(2048, 120 + seed);
    const Matrix kernel = assemble_dense_block(b.points, model, b.points);
    const Scalar r_dirac = (h - kernel * alpha).norm();
    const Scalar r_samplet =
        (b.basis->forward(h) - ksig.multiply(b.basis->forward(alpha))).norm();
    worst = std::max(worst, std::abs(r_dirac - r_samplet) / r_dirac);
  }
  std::ostringstream oss;
  oss << "residual isometry: worst relative gap " << worst << " <= 1e-10";
  report(10, worst <= 1e-10, oss.str(), now() - t0);
}

// 11: CLI determinism, byte-identical artifacts on rerun.
void criterion_11() {
  const double t0 = now();
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mska_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfgpath = dir / "run.cfg";
  {
    std::ofstream out(cfgpath);
    out << "input.function = gauss4\ninput.n = 2000\nseed = 5\nsubsample.eps2 = 1e-8\n"
        << "dictionary.L = 2\ndictionary.a = rho_t\ndictionary.b = 2*h_t\n"
        << "dictionary.family = gaussian\ncontinuation.r_min = 1e-3\nevaluate.n = 5000\n"
        << "output.dir = " << (dir / "out").string() << "\n";
  }
  auto cli = [&](const std::string& cmd) {
    const std::string full =
        std::string(MSKA_CLI_PATH) + " " + cmd + " --config " + cfgpath.string() +
        " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(full.c_str()));
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  bool pass = cli("subsample") == 0 && cli("solve") == 0 && cli("evaluate") == 0;
  const std::vector<std::string> artifacts{"subsample_indices.csv", "subsample_stats.csv",
                                           "coefficients.csv",      "sparsity.csv",
                                           "solver_report.csv",     "error_report.csv",
                                           "reconstruction_grid.csv"};
  std::vector<std::string> before;
  for (const auto& a : artifacts) before.push_back(slurp(dir / "out" / a));
  pass = pass && cli("subsample") == 0 && cli("solve") == 0 && cli("evaluate") == 0;
  for (std::size_t i = 0; i < artifacts.size(); ++i)
    pass = pass && !before[i].empty() && slurp(dir / "out" / artifacts[i]) == before[i];
  fs::remove_all(dir);
  report(11, pass, "CLI determinism: byte-identical artifacts on rerun", now() - t0);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criteria_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
