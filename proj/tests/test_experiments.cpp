#include <doctest.h>

#include "mska/experiments.hpp"
#include "mska/metrics.hpp"
#include "mska/test_functions.hpp"
#include "oracles.hpp"

using namespace mska;

TEST_CASE("gauss4 values") {
  // peak lower bound at the first center
  CHECK(eval_gauss4(0.20, 0.80) >= 0.50);
  // independent re-evaluation of the four-term sum at the origin
  const Scalar cx[4] = {0.20, 0.75, 0.65, 0.30};
  const Scalar cy[4] = {0.80, 0.25, 0.65, 0.30};
  const Scalar a[4] = {0.50, 0.60, 0.40, 0.55};
  const Scalar s[4] = {0.03, 0.06, 0.13, 0.25};
  Scalar expect = 0;
  for (int k = 0; k < 4; ++k)
    expect += a[k] * std::exp(-(cx[k] * cx[k] + cy[k] * cy[k]) / (2 * s[k] * s[k]));
  CHECK(eval_gauss4(0, 0) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("gauss4 fine-level samplet coefficients decay") {
  const Dataset ds = make_function_dataset("gauss4", 100000, 10, 7);
  RunConfig cfg;
  cfg.input_function = "gauss4";
  const SubsampleResult sub = run_subsample(ds.points, ds.values, cfg);
  const Vector& w = sub.hsig;
  const Scalar scale = w.cwiseAbs().maxCoeff();
  Scalar max_fine = 0;
  const Index max_level = sub.basis->num_levels() - 1;
  for (Index g = 0; g < w.size(); ++g)
    if (sub.basis->level_of(g) >= max_level - 1) max_fine = std::max(max_fine, std::abs(w[g]));
  CHECK(max_fine <= 1e-3 * scale);
}

TEST_CASE("heterogeneous2d structural properties") {
  SUBCASE("constant inside the block") {
    const Scalar base = eval_heterogeneous2d(1.1, 4.9);
    CHECK(base == het2d::block_value);
    for (auto [dx, dy] : std::vector<std::pair<Scalar, Scalar>>{
             {0.05, 0.0}, {-0.05, 0.0}, {0.0, 0.05}, {0.0, -0.05}})
      CHECK(eval_heterogeneous2d(1.1 + dx, 4.9 + dy) == base);
  }
  SUBCASE("exact linear fit inside the gradient region") {
    // f(x,y) = 0.15 (x - 0.4) + 0.075 (y - 0.4) there
    for (auto [x, y] : std::vector<std::pair<Scalar, Scalar>>{
             {0.8, 0.8}, {1.5, 2.0}, {2.2, 0.6}, {1.0, 1.7}}) {
      const Scalar expect = 0.15 * (x - 0.4) + 0.075 * (y - 0.4);
      CHECK(eval_heterogeneous2d(x, y) == doctest::Approx(expect).epsilon(1e-15));
    }
  }
  SUBCASE("features are present") {
    CHECK(eval_heterogeneous2d(1.5, 3.4) == doctest::Approx(1.0));          // cone apex
    CHECK(eval_heterogeneous2d(4.6, 1.3) == doctest::Approx(0.9));          // cusp center
    CHECK(eval_heterogeneous2d(4.7, 5.0 + 0.9) > 0.3);                      // ridge crest
    CHECK(eval_heterogeneous2d(5.9, 0.2) == 0.0);                           // background
  }
}

TEST_CASE("subsampling concentrates sites near the singular features") {
  const Dataset ds = make_function_dataset("heterogeneous2d", 30000, 10, 11);
  RunConfig cfg;
  cfg.input_function = "heterogeneous2d";
  cfg.eps2 = 1e-7;
  const SubsampleResult sub = run_subsample(ds.points, ds.values, cfg);

  // bands around the singular sets: cusp tip, cone disk, ridge crest, wedge,
  // and the skirt rings of the block and the gradient plateau
  auto near_feature = [](Scalar x, Scalar y) {
    using namespace het2d;
    const Scalar cusp = std::hypot(x - cusp_center[0], y - cusp_center[1]);
    if (cusp < 0.35) return true;
    const Scalar ridge = std::hypot(x - ridge_center[0], y - ridge_center[1]);
    if (std::abs(ridge - ridge_radius) < ridge_halfband && y > ridge_center[1]) return true;
    if (x > 2.9 && x < 5.3 && std::abs(y - 3.9) < 0.35 * (x - 2.9) / 2.4) return true;
    auto ring = [&](const Scalar lo[2], const Scalar hi[2]) {
      const Scalar pad = skirt + 0.1;
      const bool outer =
          x > lo[0] - pad && x < hi[0] + pad && y > lo[1] - pad && y < hi[1] + pad;
      const bool inner =
          x > lo[0] + 0.1 && x < hi[0] - 0.1 && y > lo[1] + 0.1 && y < hi[1] - 0.1;
      return outer && !inner;
    };
    if (ring(block_lo, block_hi) || ring(grad_lo, grad_hi)) return true;
    const Scalar cone = std::hypot(x - cone_center[0], y - cone_center[1]);
    return cone < cone_radius;
  };

  Index band_sel = 0, bg_sel = 0, band_all = 0, bg_all = 0;
  for (Index i = 0; i < sub.subsample.points.rows(); ++i)
    (near_feature(sub.subsample.points(i, 0), sub.subsample.points(i, 1)) ? band_sel : bg_sel)++;
  for (Index i = 0; i < ds.points.rows(); ++i)
    (near_feature(ds.points(i, 0), ds.points(i, 1)) ? band_all : bg_all)++;
  REQUIRE(band_all > 0);
  REQUIRE(bg_all > 0);
  const Scalar band_density = Scalar(band_sel) / Scalar(band_all);
  const Scalar bg_density = Scalar(bg_sel) / Scalar(bg_all);
  CHECK(band_density >= 3.0 * bg_density);
}

TEST_CASE("phong reflectance") {
  Vector x = Vector::Zero(3);
  SUBCASE("normal perpendicular to the light direction leaves the specular tail") {
    Vector n(3);
    n << 0, 1, 0;  // n . v_l = 0
    const Vector r = phong_reflection(n);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-14));
    Vector vo(3);
    vo << 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), 2.0 / std::sqrt(6.0);
    const Scalar expect = 0.10 * std::exp(-(r - vo).squaredNorm() / 8.0);
    CHECK(eval_phong(x, n) == doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("normal aligned with the light gives the full diffuse term") {
    Vector n(3);
    n << 1.0 / std::sqrt(2.0), 0, 1.0 / std::sqrt(2.0);
    CHECK(eval_phong(x, n) >= 0.5);
    CHECK(eval_phong(x, n) <= 0.6);
  }
  SUBCASE("reflection preserves the norm for random unit normals") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      Vector n = oracles::random_vector(3, seed);
      n.normalize();
      CHECK(phong_reflection(n).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("non-unit normals are rejected") {
    Vector n(3);
    n << 1, 1, 0;
    CHECK_THROWS_AS(eval_phong(x, n), DataError);
  }
}

TEST_CASE("relative l2 error") {
  const Vector ref = oracles::random_vector(5000, 12);
  CHECK(relative_l2_error(ref, ref) == 0.0);
  CHECK(relative_l2_error(Vector::Zero(5000), ref) == 1.0);
  CHECK_THROWS_AS(relative_l2_error(ref, Vector::Zero(5000)), DataError);

  // compensated-summation oracle
  const Vector approx = ref + 1e-3 * oracles::random_vector(5000, 13);
  const Scalar plain = relative_l2_error(approx, ref);
  const Scalar compensated = std::sqrt(oracles::kahan_sum_squares(approx - ref) /
                                       oracles::kahan_sum_squares(ref));
  CHECK(plain == doctest::Approx(compensated).epsilon(1e-10));
}

TEST_CASE("least squares helper matches a dense solve") {
  const Matrix dense = oracles::random_gaussian(120, 30, 14);
  std::vector<Triplet> trips;
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < dense.cols(); ++j) trips.push_back({i, j, dense(i, j)});
  const SparseMatrix sparse = SparseMatrix::from_triplets(120, 30, std::move(trips));
  const Vector b = oracles::random_vector(120, 15);
  const Vector x = least_squares_solve(sparse, b);
  const Vector expect = dense.colPivHouseholderQr().solve(b);
  CHECK((x - expect).norm() <= 1e-8 * expect.norm());
}

TEST_CASE("run_test on the smallest scale produces sane reports") {
  TestCaseConfig tc;
  tc.name = "2B";
  tc.scale = 0.003;  // 3000 points
  tc.n_eval = 5000;
  const auto reports = run_test(tc);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].subsample_size > 10);
  CHECK(reports[0].e2 < 0.5);
  CHECK(reports[0].per_kernel.size() == 1);
}
