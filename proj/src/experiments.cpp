#include "mska/experiments.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mska/io.hpp"
#include "mska/metrics.hpp"
#include "mska/neighbors.hpp"
#include "mska/test_functions.hpp"

namespace mska {

namespace {

Scalar eval_builtin(const std::string& function, const Eigen::Ref<const Vector>& x) {
  if (function == "gauss4") return eval_gauss4(x[0], x[1]);
  if (function == "heterogeneous2d") return eval_heterogeneous2d(x[0], x[1]);
  throw UsageError("unknown builtin function '" + function + "'");
}

void builtin_domain(const std::string& function, Vector& lo, Vector& hi) {
  lo.resize(2);
  hi.resize(2);
  if (function == "gauss4") {
    lo << 0, 0;
    hi << 1, 1;
  } else if (function == "heterogeneous2d") {
    lo << 0, 0;
    hi << 6, 6;
  } else {
    throw UsageError("unknown builtin function '" + function + "'");
  }
}

Matrix sample_uniform(const Vector& lo, const Vector& hi, Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
  Matrix pts(n, lo.size());
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < lo.size(); ++k) pts(i, k) = lo[k] + (hi[k] - lo[k]) * unit(rng);
  return pts;
}

}  // namespace

Dataset make_function_dataset(const std::string& function, Index n, Index n_eval,
                              uint64_t seed) {
  if (n < 1) throw UsageError("input.n must be positive");
  Dataset ds;
  ds.function = function;
  builtin_domain(function, ds.domain_lo, ds.domain_hi);
  std::mt19937_64 rng(seed);
  ds.points = sample_uniform(ds.domain_lo, ds.domain_hi, n, rng);
  std::mt19937_64 rng_eval(seed ^ 0x9e3779b97f4a7c15ULL);
  ds.eval_points = sample_uniform(ds.domain_lo, ds.domain_hi, n_eval, rng_eval);
  ds.values.resize(n);
  ds.eval_values.resize(n_eval);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) ds.values[i] = eval_builtin(function, ds.points.row(i).transpose());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n_eval; ++i)
    ds.eval_values[i] = eval_builtin(function, ds.eval_points.row(i).transpose());
  return ds;
}

Dataset load_file_dataset(const std::string& path, Index dim, uint64_t seed) {
  Dataset ds;
  Matrix pts;
  Vector vals;
  if (path.size() > 4 && path.substr(path.size() - 4) == ".ply") {
    PlyMesh mesh = read_ply(path);
    Matrix normals = mesh.has_normals ? mesh.normals : face_average_normals(mesh.vertices, mesh.faces);
    if (!mesh.has_normals && mesh.faces.empty())
      throw DataError(path + ": mesh has neither normals nor faces to derive them from");
    pts = mesh.vertices;
    vals.resize(pts.rows());
    for (Index i = 0; i < pts.rows(); ++i) {
      Vector n = normals.row(i).transpose();
      const Scalar len = n.norm();
      if (len == 0) throw DataError(path + ": vertex " + std::to_string(i) + " has no normal");
      n /= len;
      vals[i] = eval_phong(pts.row(i).transpose(), n);
    }
  } else {
    const Matrix table = read_table(path);
    if (table.cols() == dim) {
      throw DataError(path + ": expected " + std::to_string(dim) +
                      " coordinate columns plus one value column");
    } else if (table.cols() == dim + 1) {
      pts = table.leftCols(dim);
      vals = table.col(dim);
    } else {
      throw DataError(path + ": expected " + std::to_string(dim + 1) + " columns, found " +
                      std::to_string(table.cols()));
    }
  }

  // Seeded 10% hold-out for evaluation.
  const Index n = pts.rows();
  if (n < 10) throw DataError(path + ": too few rows for a train/eval split");
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed ^ 0xda7a5e7ULL);
  std::shuffle(order.begin(), order.end(), rng);
  const Index n_eval = std::max<Index>(1, n / 10);
  const Index n_fit = n - n_eval;
  ds.points.resize(n_fit, pts.cols());
  ds.values.resize(n_fit);
  ds.eval_points.resize(n_eval, pts.cols());
  ds.eval_values.resize(n_eval);
  for (Index i = 0; i < n_fit; ++i) {
    ds.points.row(i) = pts.row(order[i]);
    ds.values[i] = vals[order[i]];
  }
  for (Index i = 0; i < n_eval; ++i) {
    ds.eval_points.row(i) = pts.row(order[n_fit + i]);
    ds.eval_values[i] = vals[order[n_fit + i]];
  }
  ds.domain_lo = ds.points.colwise().minCoeff().transpose();
  ds.domain_hi = ds.points.colwise().maxCoeff().transpose();
  return ds;
}

Dataset make_dataset(const RunConfig& cfg) {
  if (!cfg.input_path.empty()) return load_file_dataset(cfg.input_path, cfg.dim, cfg.seed);
  if (cfg.input_function.empty())
    throw UsageError("config needs input.path or input.function");
  return make_function_dataset(cfg.input_function, cfg.input_n, cfg.eval_n, cfg.seed);
}

namespace {

Scalar resolve_sub_lengthscale(const RunConfig& cfg, const Matrix& points) {
  const std::string& spec = cfg.sub_kernel_lengthscale;
  if (spec == "auto") {
    const Vector lo = points.colwise().minCoeff().transpose();
    const Vector hi = points.colwise().maxCoeff().transpose();
    return (hi - lo).norm() / 3.0;
  }
  if (spec == "sep") return separation_radius(points);
  try {
    return std::stod(spec);
  } catch (const std::exception&) {
    throw UsageError("subsample.kernel.lengthscale must be 'auto', 'sep' or a number");
  }
}

// Schedule endpoint: a number, or k*rho_t / k*h_t.
Scalar resolve_schedule_value(const std::string& expr, const Subsample& sub) {
  std::string s = expr;
  Scalar factor = 1.0;
  const auto star = s.find('*');
  if (star != std::string::npos) {
    factor = std::stod(s.substr(0, star));
    s = s.substr(star + 1);
  }
  if (s == "rho_t") return factor * sub.separation;
  if (s == "h_t") return factor * sub.fill;
  try {
    std::size_t used = 0;
    const Scalar v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return factor * v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse schedule value '" + expr + "' (number, k*rho_t or k*h_t)");
  }
}

}  // namespace

SubsampleResult run_subsample(const Matrix& points, const Vector& values, const RunConfig& cfg) {
  if (points.rows() != values.size()) throw DataError("points/values length mismatch");
  SubsampleResult out;
  const MomentSpec spec = make_moment_spec(cfg.q_plus_1 - 1, points.cols());
  const Index leaf_cap = cfg.leaf_capacity > 0 ? cfg.leaf_capacity : 2 * spec.m_q;
  const SplitRule rule = cfg.split_rule == "midpoint" ? SplitRule::Midpoint : SplitRule::Median;
  if (cfg.split_rule != "median" && cfg.split_rule != "midpoint")
    throw UsageError("tree.split must be median or midpoint");

  auto [tree, perm] = build_cluster_tree(PointSet(points), leaf_cap, rule);
  out.tree = std::make_shared<ClusterTree>(std::move(tree));
  out.basis = std::make_shared<SampletBasis>(compute_samplet_basis(*out.tree, spec));
  out.hsig = out.basis->forward(values);

  if (cfg.subsample_mode == "xprime")
    out.mode = EnergyMode::Xprime;
  else if (cfg.subsample_mode == "hprime")
    out.mode = EnergyMode::Hprime;
  else
    throw UsageError("subsample.mode must be xprime or hprime");

  EnergyTree et;
  if (out.mode == EnergyMode::Xprime) {
    et = compute_energies(*out.basis, out.hsig, EnergyMode::Xprime);
  } else {
    KernelModel sub_kernel{kernel_family_from_string(cfg.sub_kernel_family),
                           resolve_sub_lengthscale(cfg, points)};
    CompressionConfig ccfg{cfg.rho > 0 ? cfg.rho : Scalar(points.cols()), cfg.kappa};
    const SparseMatrix ksig = assemble_compressed_square(*out.basis, sub_kernel, ccfg);
    const Vector zsig = ksig.multiply(out.hsig);
    const LumpedDiagonal weights = make_lumped_diagonal(out.hsig, zsig);
    et = compute_energies(*out.basis, out.hsig, EnergyMode::Hprime, &weights);
  }
  propagate_modified_energies(et);
  out.total_energy = et.total();
  // threshold t = eps2 ||h^S||^2 in both energy modes
  const AdaptiveSubtree subtree = adaptive_subtree(et, out.hsig.squaredNorm(), cfg.eps2);
  out.subsample = select_representatives(subtree, *out.tree);
  out.subsample.eps2 = cfg.eps2;
  out.subsample.mode = out.mode;
  return out;
}

KernelDictionary build_dictionary(const RunConfig& cfg, const Subsample& sub) {
  if (cfg.dict_count < 1) throw UsageError("dictionary.L must be >= 1");
  LengthscaleSchedule sched;
  sched.a = resolve_schedule_value(cfg.dict_a, sub);
  sched.b = resolve_schedule_value(cfg.dict_b, sub);
  sched.count = cfg.dict_count;
  KernelDictionary dict;
  const KernelFamily family = kernel_family_from_string(cfg.dict_family);
  for (Scalar l : sched.values()) dict.entries.push_back({KernelModel{family, l}, sub.points});
  return dict;
}

SolveRun run_solve(const SubsampleResult& sub, const Matrix& points, const Vector& values,
                   const RunConfig& cfg) {
  SolveRun run;
  run.dict = build_dictionary(cfg, sub.subsample);
  run.offsets = run.dict.column_offsets();
  run.samplet_coordinates = cfg.coordinates == "samplet";
  if (!run.samplet_coordinates && cfg.coordinates != "dirac")
    throw UsageError("solve.coordinates must be samplet or dirac");

  LassoProblem problem;
  std::shared_ptr<ClusterTree> col_tree;
  std::shared_ptr<SampletBasis> col_basis;

  if (run.samplet_coordinates) {
    const MomentSpec spec = make_moment_spec(cfg.q_plus_1 - 1, points.cols());
    const Index leaf_cap = cfg.leaf_capacity > 0 ? cfg.leaf_capacity : 2 * spec.m_q;
    auto [tree, perm] = build_cluster_tree(PointSet(sub.subsample.points), leaf_cap);
    col_tree = std::make_shared<ClusterTree>(std::move(tree));
    col_basis = std::make_shared<SampletBasis>(compute_samplet_basis(*col_tree, spec));
    CompressionConfig ccfg{cfg.rho > 0 ? cfg.rho : Scalar(points.cols()), cfg.kappa};
    std::vector<const SampletBasis*> col_bases(run.dict.entries.size(), col_basis.get());
    run.matrix = assemble_compressed_rect(*sub.basis, run.dict, col_bases, ccfg);
    problem.op = LinOp(run.matrix);
    problem.h = sub.hsig;
  } else {
    problem.op = LinOp(assemble_dense(PointSet(points), run.dict));
    problem.h = values;
  }

  const LipschitzEstimate lip = estimate_lipschitz(problem.op);
  if (lip.zero_operator || lip.value <= 0)
    throw SolverError("operator has zero spectral norm, lambda = 2/L undefined");
  run.lipschitz = lip.value;
  run.lambda = 2.0 / lip.value;
  problem.lipschitz = lip.value;
  problem.lambda = run.lambda;
  problem.w =
      Vector::Constant(run.offsets.back(), 1.0 / std::sqrt(Scalar(sub.subsample.points.rows())));

  ContinuationConfig cc;
  cc.r0 = cfg.r0;
  cc.gamma = cfg.gamma;
  cc.r_min = cfg.r_min;
  cc.inner.tol = cfg.tol;
  cc.inner.maxit = cfg.maxit;
  cc.inner.eta1 = cfg.eta1;
  cc.inner.eta2 = cfg.eta2;
  cc.inner.delta0 = cfg.delta0;
  cc.inner.delta_min = cfg.delta_min;
  cc.inner.delta_max = cfg.delta_max;
  cc.inner.c_tau = cfg.c_tau;
  cc.inner.c_nu = cfg.c_nu;
  cc.inner.p_tilde = cfg.p_tilde;

  run.continuation = continuation_solve(problem, cc);
  run.beta = run.continuation.alpha;

  if (run.samplet_coordinates) {
    run.alpha.resize(run.beta.size());
    for (std::size_t l = 0; l < run.dict.entries.size(); ++l)
      run.alpha.segment(run.offsets[l], run.offsets[l + 1] - run.offsets[l]) =
          col_basis->inverse(run.beta.segment(run.offsets[l], run.offsets[l + 1] - run.offsets[l]));
  } else {
    run.alpha = run.beta;
  }
  return run;
}

Vector evaluate_expansion(const KernelDictionary& dict, const IndexVector& offsets,
                          const Vector& alpha, const Matrix& eval_points) {
  const Index n = eval_points.rows();
  Vector out = Vector::Zero(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto x = eval_points.row(i);
    Scalar s = 0;
    for (std::size_t l = 0; l < dict.entries.size(); ++l) {
      const auto& entry = dict.entries[l];
      for (Index j = 0; j < entry.centers.rows(); ++j) {
        const Scalar a = alpha[offsets[l] + j];
        if (a == Scalar(0)) continue;
        s += a * entry.model((x - entry.centers.row(j)).norm());
      }
    }
    out[i] = s;
  }
  return out;
}

Vector least_squares_solve(const SparseMatrix& a, const Vector& b) {
  if (a.rows() * a.cols() <= Index(40'000'000)) {
    std::vector<Index> all(a.cols());
    std::iota(all.begin(), all.end(), Index{0});
    const Matrix dense = a.gather_columns(all);
    return Eigen::BDCSVD<Matrix>(dense, Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
  }
  // Normal equations fallback for tall problems; mild ridge for definiteness.
  const Index m = a.cols();
  Matrix g = Matrix::Zero(m, m);
  const auto& off = a.row_offsets();
  const auto& idx = a.col_indices();
  const auto& val = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k1 = off[r]; k1 < off[r + 1]; ++k1)
      for (Index k2 = off[r]; k2 < off[r + 1]; ++k2) g(idx[k1], idx[k2]) += val[k1] * val[k2];
  const Scalar jitter = 1e-12 * g.trace() / std::max<Index>(m, 1);
  g.diagonal().array() += jitter;
  const Vector rhs = a.multiply_t(b);
  return Eigen::LDLT<Matrix>(g).solve(rhs);
}

namespace {

struct TestPreset {
  RunConfig cfg;
  Index paper_n = 0;
  std::string solve_kind;  // "lasso" | "ls"
};

TestPreset test_preset(const TestCaseConfig& tc) {
  TestPreset p;
  RunConfig& c = p.cfg;
  c.seed = tc.seed;
  c.eval_n = tc.n_eval;
  const std::string& t = tc.name;
  if (t == "1A" || t == "1B" || t == "1C") {
    c.input_function = "heterogeneous2d";
    p.paper_n = 300000;
    c.eps2 = t == "1A" ? 1e-4 : (t == "1B" ? 1e-7 : 1e-10);
    c.dict_family = "exponential";
    c.dict_count = 1;
    c.dict_a = "10*h_t";
    c.dict_b = "10*h_t";
    p.solve_kind = "ls";
  } else if (t == "2A" || t == "2B" || t == "2C") {
    c.input_function = "gauss4";
    p.paper_n = 1000000;
    c.eps2 = 1e-13;
    c.dict_family = "gaussian";
    if (t == "2C") {
      c.dict_count = 4;
      c.dict_a = "rho_t";
      c.dict_b = "2*h_t";
    } else {
      c.dict_count = 1;
      c.dict_a = "h_t";
      c.dict_b = "h_t";
    }
    c.coordinates = t == "2A" ? "dirac" : "samplet";
    c.tol = 1e-6;
    c.maxit = 100;
    c.r_min = 1e-5;
    c.gamma = 0.7;
    p.solve_kind = "lasso";
  } else if (t == "3") {
    c.input_function = "heterogeneous2d";
    p.paper_n = 1000000;
    c.subsample_mode = "hprime";
    c.eps2 = 1e-8;
    c.sub_kernel_family = "exponential";
    c.sub_kernel_lengthscale = "sep";
    c.dict_family = "exponential";
    c.dict_count = 5;
    c.dict_a = "2*rho_t";
    c.dict_b = "2*h_t";
    c.tol = 1e-6;
    c.maxit = 50;
    c.r_min = 1e-7;
    c.gamma = 0.7;
    p.solve_kind = "lasso";
  } else if (t == "4") {
    if (tc.mesh_path.empty()) throw UsageError("test 4 needs a mesh path");
    c.input_path = tc.mesh_path;
    c.dim = 3;
    p.paper_n = 0;  // the mesh decides
    c.eps2 = 1e-5;
    c.dict_family = "exponential";
    c.dict_count = 3;
    c.dict_a = "5*rho_t";
    c.dict_b = "2*h_t";
    c.tol = 1e-5;
    c.maxit = 50;
    c.r_min = 1e-4;
    c.gamma = 0.75;
    p.solve_kind = "lasso";
  } else {
    throw UsageError("unknown test case '" + t + "' (expected 1A,1B,1C,2A,2B,2C,3,4)");
  }
  if (p.paper_n > 0) c.input_n = std::max<Index>(1000, Index(std::llround(p.paper_n * tc.scale)));
  return p;
}

ErrorReport report_for(const SubsampleResult& sub, const std::string& label) {
  ErrorReport rep;
  rep.label = label;
  rep.subsample_size = sub.subsample.points.rows();
  rep.separation = sub.subsample.separation;
  rep.fill = sub.subsample.fill;
  return rep;
}

}  // namespace

std::vector<ErrorReport> run_test(const TestCaseConfig& tc) {
  TestPreset preset = test_preset(tc);
  const Dataset ds = make_dataset(preset.cfg);
  std::vector<ErrorReport> reports;

  const bool both_modes = preset.solve_kind == "ls";  // test 1 compares the two criteria
  std::vector<std::string> modes =
      both_modes ? std::vector<std::string>{"xprime", "hprime"}
                 : std::vector<std::string>{preset.cfg.subsample_mode};

  for (const std::string& mode : modes) {
    RunConfig cfg = preset.cfg;
    cfg.subsample_mode = mode;
    const SubsampleResult sub = run_subsample(ds.points, ds.values, cfg);
    ErrorReport rep = report_for(sub, tc.name + "-" + mode);

    if (preset.solve_kind == "ls") {
      const KernelDictionary dict = build_dictionary(cfg, sub.subsample);
      CompressionConfig ccfg{cfg.rho > 0 ? cfg.rho : Scalar(ds.points.cols()), cfg.kappa};
      const SparseMatrix ksig =
          assemble_compressed_rect(*sub.basis, dict, {}, ccfg);  // row-only, T K
      const Vector beta = least_squares_solve(ksig, sub.hsig);
      const Vector approx = evaluate_expansion(dict, dict.column_offsets(), beta, ds.eval_points);
      rep.e2 = relative_l2_error(approx, ds.eval_values);
      rep.max_err = max_abs_error(approx, ds.eval_values);
      rep.per_kernel.push_back({dict.entries[0].model.lengthscale,
                                (beta.array() != 0).count(), beta.size()});
    } else {
      const SolveRun solved = run_solve(sub, ds.points, ds.values, cfg);
      const Vector approx =
          evaluate_expansion(solved.dict, solved.offsets, solved.alpha, ds.eval_points);
      rep.e2 = relative_l2_error(approx, ds.eval_values);
      rep.max_err = max_abs_error(approx, ds.eval_values);
      for (std::size_t l = 0; l < solved.dict.entries.size(); ++l) {
        const Index len = solved.offsets[l + 1] - solved.offsets[l];
        rep.per_kernel.push_back(
            {solved.dict.entries[l].model.lengthscale,
             (solved.beta.segment(solved.offsets[l], len).array() != 0).count(), len});
      }
    }
    reports.push_back(std::move(rep));
  }

  if (!tc.out_dir.empty()) {
    std::filesystem::create_directories(tc.out_dir);
    std::ofstream out(tc.out_dir + "/metrics.csv");
    out << "label,subsample_size,separation,fill,e2,max_err,sparsity\n";
    for (const auto& rep : reports) {
      out << rep.label << "," << rep.subsample_size << "," << rep.separation << "," << rep.fill
          << "," << rep.e2 << "," << rep.max_err << ",";
      for (std::size_t l = 0; l < rep.per_kernel.size(); ++l)
        out << rep.per_kernel[l].active << "/" << rep.per_kernel[l].total
            << (l + 1 < rep.per_kernel.size() ? ";" : "");
      out << "\n";
    }
  }
  return reports;
}

}  // namespace mska
