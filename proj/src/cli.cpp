#include "mska/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mska/experiments.hpp"
#include "mska/io.hpp"
#include "mska/metrics.hpp"

namespace mska {

namespace {

void write_effective_config(const RunConfig& cfg) {
  std::ofstream out(cfg.output_dir + "/effective_config.txt");
  if (!out) throw DataError("cannot write into output directory " + cfg.output_dir);
  out << cfg.echo();
}

std::string fmt(Scalar v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void cmd_subsample(const RunConfig& cfg) {
  const Dataset ds = make_dataset(cfg);
  const SubsampleResult sub = run_subsample(ds.points, ds.values, cfg);
  std::filesystem::create_directories(cfg.output_dir);
  write_effective_config(cfg);

  {
    std::ofstream out(cfg.output_dir + "/subsample_indices.csv");
    out << "index";
    for (Index k = 0; k < ds.points.cols(); ++k) out << ",x" << k;
    out << "\n";
    for (std::size_t i = 0; i < sub.subsample.indices.size(); ++i) {
      out << sub.subsample.indices[i];
      for (Index k = 0; k < sub.subsample.points.cols(); ++k)
        out << "," << fmt(sub.subsample.points(static_cast<Index>(i), k));
      out << "\n";
    }
  }
  {
    std::ofstream out(cfg.output_dir + "/subsample_stats.csv");
    out << "count,separation,fill,eps2,mode\n";
    out << sub.subsample.points.rows() << "," << fmt(sub.subsample.separation) << ","
        << fmt(sub.subsample.fill) << "," << fmt(cfg.eps2) << "," << cfg.subsample_mode << "\n";
  }
}

void cmd_solve(const RunConfig& cfg) {
  const Dataset ds = make_dataset(cfg);
  const SubsampleResult sub = run_subsample(ds.points, ds.values, cfg);
  const SolveRun run = run_solve(sub, ds.points, ds.values, cfg);
  std::filesystem::create_directories(cfg.output_dir);
  write_effective_config(cfg);

  {
    std::ofstream out(cfg.output_dir + "/coefficients.csv");
    out << "entry,lengthscale,center_index,beta,alpha\n";
    for (std::size_t l = 0; l < run.dict.entries.size(); ++l) {
      const Index len = run.offsets[l + 1] - run.offsets[l];
      for (Index j = 0; j < len; ++j)
        out << l << "," << fmt(run.dict.entries[l].model.lengthscale) << ","
            << sub.subsample.indices[j] << "," << fmt(run.beta[run.offsets[l] + j]) << ","
            << fmt(run.alpha[run.offsets[l] + j]) << "\n";
    }
  }
  {
    std::ofstream out(cfg.output_dir + "/sparsity.csv");
    out << "entry,lengthscale,active,total\n";
    for (std::size_t l = 0; l < run.dict.entries.size(); ++l) {
      const Index len = run.offsets[l + 1] - run.offsets[l];
      out << l << "," << fmt(run.dict.entries[l].model.lengthscale) << ","
          << (run.beta.segment(run.offsets[l], len).array() != 0).count() << "," << len << "\n";
    }
  }
  {
    std::ofstream out(cfg.output_dir + "/solver_report.csv");
    out << "level,r,iteration,residual,active,condition,ratio,accepted\n";
    for (std::size_t lvl = 0; lvl < run.continuation.levels.size(); ++lvl)
      for (const auto& rec : run.continuation.levels[lvl].history)
        out << lvl << "," << fmt(run.continuation.r_values[lvl]) << "," << rec.iteration << ","
            << fmt(rec.fnor_norm) << "," << rec.active_count << "," << fmt(rec.condition) << ","
            << fmt(rec.rho_ratio) << "," << (rec.accepted ? 1 : 0) << "\n";
  }
  if (cfg.export_matrix && run.samplet_coordinates)
    run.matrix.write_triplets(cfg.output_dir + "/matrix_triplets.txt");
}

void cmd_evaluate(const RunConfig& cfg) {
  const Dataset ds = make_dataset(cfg);
  const std::string coeff_path = cfg.output_dir + "/coefficients.csv";
  if (!std::filesystem::exists(coeff_path))
    throw DataError("missing artifact " + coeff_path + " (run solve first)");

  // coefficients.csv: entry,lengthscale,center_index,beta,alpha
  std::ifstream in(coeff_path);
  std::string header;
  std::getline(in, header);
  KernelDictionary dict;
  std::vector<Vector> alphas;
  std::vector<std::vector<Index>> center_ids;
  const KernelFamily family = kernel_family_from_string(cfg.dict_family);
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream iss(line);
    Index entry, center;
    Scalar lengthscale, beta, alpha;
    if (!(iss >> entry >> lengthscale >> center >> beta >> alpha))
      throw DataError(coeff_path + ": malformed row '" + line + "'");
    if (entry == static_cast<Index>(dict.entries.size())) {
      dict.entries.push_back({KernelModel{family, lengthscale}, Matrix()});
      alphas.emplace_back();
      center_ids.emplace_back();
    }
    center_ids[entry].push_back(center);
    alphas[entry].conservativeResize(alphas[entry].size() + 1);
    alphas[entry][alphas[entry].size() - 1] = alpha;
  }
  if (dict.entries.empty()) throw DataError(coeff_path + ": no coefficients");

  Vector alpha_all(0);
  for (std::size_t l = 0; l < dict.entries.size(); ++l) {
    Matrix centers(static_cast<Index>(center_ids[l].size()), ds.points.cols());
    for (std::size_t j = 0; j < center_ids[l].size(); ++j) {
      if (center_ids[l][j] < 0 || center_ids[l][j] >= ds.points.rows())
        throw DataError(coeff_path + ": center index out of range");
      centers.row(static_cast<Index>(j)) = ds.points.row(center_ids[l][j]);
    }
    dict.entries[l].centers = std::move(centers);
    const Index old = alpha_all.size();
    alpha_all.conservativeResize(old + alphas[l].size());
    alpha_all.tail(alphas[l].size()) = alphas[l];
  }

  const IndexVector offsets = dict.column_offsets();
  const Vector approx = evaluate_expansion(dict, offsets, alpha_all, ds.eval_points);
  const Scalar e2 = relative_l2_error(approx, ds.eval_values);
  const Scalar maxe = max_abs_error(approx, ds.eval_values);

  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.output_dir + "/error_report.csv");
    out << "e2,max_err,n_eval\n";
    out << fmt(e2) << "," << fmt(maxe) << "," << ds.eval_points.rows() << "\n";
  }
  if (ds.points.cols() == 2) {
    const Index g = std::max<Index>(cfg.eval_grid, 2);
    Matrix grid(g * g, 2);
    for (Index i = 0; i < g; ++i)
      for (Index j = 0; j < g; ++j) {
        grid(i * g + j, 0) =
            ds.domain_lo[0] + (ds.domain_hi[0] - ds.domain_lo[0]) * Scalar(j) / Scalar(g - 1);
        grid(i * g + j, 1) =
            ds.domain_lo[1] + (ds.domain_hi[1] - ds.domain_lo[1]) * Scalar(i) / Scalar(g - 1);
      }
    const Vector values = evaluate_expansion(dict, offsets, alpha_all, grid);
    Matrix table(grid.rows(), 3);
    table.leftCols(2) = grid;
    table.col(2) = values;
    write_matrix_csv(cfg.output_dir + "/reconstruction_grid.csv", {"x", "y", "value"}, table);
  } else {
    Matrix table(ds.eval_points.rows(), ds.eval_points.cols() + 1);
    table.leftCols(ds.eval_points.cols()) = ds.eval_points;
    table.col(ds.eval_points.cols()) = approx;
    write_matrix_csv(cfg.output_dir + "/reconstruction_points.csv", {}, table);
  }
}

}  // namespace mska
