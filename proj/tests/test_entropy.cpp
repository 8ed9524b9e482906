#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "coral/entropy.hpp"

using namespace coral;

namespace {

constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

PointCloud random_cloud(std::mt19937_64& rng, int dim, std::size_t n,
                        double extent) {
  std::uniform_real_distribution<double> dist(-extent, extent);
  PointCloud c(dim);
  for (std::size_t i = 0; i < n; ++i)
    c.add(dist(rng), dist(rng), dim == 3 ? dist(rng) : 0.0);
  return c;
}

// Entropy of a point set computed straight from the definition with Eigen:
// population covariance, then 0.5*ln((2*pi*e)^N * det).
double entropy_oracle(const std::vector<Eigen::Vector3d>& pts, int dim) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());
  const double det = dim == 2
                         ? cov.topLeftCorner<2, 2>().determinant()
                         : cov.determinant();
  return 0.5 * std::log(std::pow(kTwoPiE, dim) * det);
}

}  // namespace

TEST_CASE("point entropy of a hand-computed square") {
  // Unit square corners: population covariance diag(1/4, 1/4), det 1/16,
  // h = 0.5 * ln((2*pi*e)^2 / 16) = ln(pi*e/2).
  const std::vector<double> xs{0.0, 1.0, 0.0, 1.0};
  const std::vector<double> ys{0.0, 0.0, 1.0, 1.0};
  CoralParams params;
  const double h = point_entropy(xs.data(), ys.data(), nullptr, 4, 2, params);
  CHECK(h == doctest::Approx(std::log(std::numbers::pi * std::numbers::e / 2))
                 .epsilon(1e-12));
}

TEST_CASE("point entropy matches an Eigen covariance oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CoralParams params;
  for (int dim : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 5 + rng() % 40;
      std::vector<double> xs(n), ys(n), zs(n, 0.0);
      std::vector<Eigen::Vector3d> pts;
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = dist(rng);
        ys[i] = dist(rng);
        if (dim == 3) zs[i] = dist(rng);
        pts.emplace_back(xs[i], ys[i], zs[i]);
      }
      const double h =
          point_entropy(xs.data(), ys.data(), zs.data(), n, dim, params);
      CHECK(h == doctest::Approx(entropy_oracle(pts, dim)).epsilon(1e-9));
    }
  }
}

TEST_CASE("degenerate neighborhoods are invalid without a determinant floor") {
  // Collinear 3D points: rank-1 covariance, det 0.
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> ys{0.0, 0.0, 0.0, 0.0, 0.0};
  const std::vector<double> zs{0.0, 0.0, 0.0, 0.0, 0.0};
  CoralParams params;
  CHECK(std::isnan(
      point_entropy(xs.data(), ys.data(), zs.data(), 5, 3, params)));

  params.epsilon = 1e-6;
  const double floored =
      point_entropy(xs.data(), ys.data(), zs.data(), 5, 3, params);
  // With det = 0 the additive floor yields exactly 0.5*ln(epsilon),
  // independent of dimension.
  CHECK(floored == doctest::Approx(0.5 * std::log(1e-6)).epsilon(1e-12));
}

TEST_CASE("too few neighbors is invalid") {
  const std::vector<double> xs{0.0, 1.0, 0.3};
  const std::vector<double> ys{0.0, 0.2, 1.0};
  CoralParams params;  // min_neighbors defaults to dim + 2 = 4
  CHECK(std::isnan(point_entropy(xs.data(), ys.data(), nullptr, 3, 2, params)));
  params.min_neighbors = 3;
  CHECK(std::isfinite(
      point_entropy(xs.data(), ys.data(), nullptr, 3, 2, params)));
}

TEST_CASE("effective radius follows d*sin(alpha), clamped") {
  CoralParams params;
  params.r_min = 0.2;
  params.r_max = 1.0;

  SUBCASE("alpha zero pins r_min") {
    CHECK(effective_radius({100, 0, 0}, {0, 0, 0}, params) == 0.2);
  }
  SUBCASE("mid-range scales with distance") {
    params.alpha = 0.92 * std::numbers::pi / 180.0;
    const double want = 30.0 * std::sin(params.alpha);
    CHECK(effective_radius({30, 0, 0}, {0, 0, 0}, params) ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK(want > 0.48);
    CHECK(want < 0.49);
  }
  SUBCASE("clamps at both ends") {
    params.alpha = 0.92 * std::numbers::pi / 180.0;
    CHECK(effective_radius({1, 0, 0}, {0, 0, 0}, params) == 0.2);
    CHECK(effective_radius({500, 0, 0}, {0, 0, 0}, params) == 1.0);
  }
}

TEST_CASE("cloud entropy agrees with a brute-force neighborhood oracle") {
  std::mt19937_64 rng(23);
  for (int dim : {2, 3}) {
    const PointCloud cloud = random_cloud(rng, dim, 300, 2.0);
    CoralParams params;
    params.r_min = 0.6;
    const NeighborhoodIndex index(cloud, params.query_radius_bound());
    const EntropyReport report =
        cloud_entropy(cloud, index, {Eigen::Vector3d::Zero()}, params);
    REQUIRE(report.per_point_entropy.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      std::vector<Eigen::Vector3d> neigh;
      for (std::size_t j = 0; j < cloud.size(); ++j)
        if ((cloud.point(j) - cloud.point(i)).norm() <= params.r_min)
          neigh.push_back(cloud.point(j));
      if (static_cast<int>(neigh.size()) <
          params.effective_min_neighbors(dim)) {
        CHECK_FALSE(report.valid[i]);
        continue;
      }
      const double want = entropy_oracle(neigh, dim);
      if (std::isfinite(want) && report.valid[i])
        CHECK(report.per_point_entropy[i] ==
              doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("outlier rejection drops the lowest entropies before aggregating") {
  std::mt19937_64 rng(29);
  const PointCloud cloud = random_cloud(rng, 2, 250, 2.0);
  CoralParams params;
  params.r_min = 0.5;
  params.e_reject = 0.1;
  const NeighborhoodIndex index(cloud, params.query_radius_bound());
  const EntropyReport report =
      cloud_entropy(cloud, index, {Eigen::Vector3d::Zero()}, params);

  std::vector<double> valid;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (report.valid[i]) valid.push_back(report.per_point_entropy[i]);
  std::sort(valid.begin(), valid.end());
  const std::size_t drop =
      static_cast<std::size_t>(std::floor(0.1 * valid.size()));
  double mean = 0.0;
  for (std::size_t i = drop; i < valid.size(); ++i) mean += valid[i];
  mean /= static_cast<double>(valid.size() - drop);
  CHECK(report.n_valid == valid.size());
  CHECK(report.n_used == valid.size() - drop);
  CHECK(report.H_agg == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("median aggregation") {
  std::mt19937_64 rng(31);
  const PointCloud cloud = random_cloud(rng, 2, 151, 2.0);
  CoralParams params;
  params.r_min = 0.5;
  params.aggregate = CoralParams::Aggregate::kMedian;
  const NeighborhoodIndex index(cloud, params.query_radius_bound());
  const EntropyReport report =
      cloud_entropy(cloud, index, {Eigen::Vector3d::Zero()}, params);
  std::vector<double> valid;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (report.valid[i]) valid.push_back(report.per_point_entropy[i]);
  std::sort(valid.begin(), valid.end());
  const std::size_t n = valid.size();
  const double want = n % 2 == 1 ? valid[n / 2]
                                 : 0.5 * (valid[n / 2 - 1] + valid[n / 2]);
  CHECK(report.H_agg == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("quality of a cloud against itself is zero") {
  // A lattice: every point is valid in both passes, so the joint and
  // separate averages run over identical point sets.
  PointCloud cloud(3);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j)
      for (int k = 0; k < 11; ++k) cloud.add(0.2 * i, 0.2 * j, 0.2 * k);
  CoralParams params;
  params.r_min = 0.45;
  const QualityResult q = coral_quality(cloud, cloud, params);
  REQUIRE(q.joint.n_valid == q.separate.n_valid);
  REQUIRE(q.joint.n_valid == cloud.size() * 2);
  // Doubling every neighborhood leaves each covariance unchanged.
  CHECK(std::abs(q.Q) < 1e-10);
  CHECK(q.H_joint == doctest::Approx(q.H_sep).epsilon(1e-10));
}

TEST_CASE("quality is symmetric in its arguments") {
  std::mt19937_64 rng(41);
  const PointCloud a = random_cloud(rng, 3, 300, 2.0);
  PointCloud b = random_cloud(rng, 3, 280, 2.0);
  b.set_origin({0.3, -0.2, 0.1});
  CoralParams params;
  params.r_min = 0.6;
  const QualityResult qab = coral_quality(a, b, params);
  const QualityResult qba = coral_quality(b, a, params);
  CHECK(qab.Q == qba.Q);  // bit-exact by construction
  CHECK(qab.H_joint == qba.H_joint);
  CHECK(qab.H_sep == qba.H_sep);
}

TEST_CASE("entropy shifts by N*ln(s) under uniform scaling") {
  std::mt19937_64 rng(43);
  for (int dim : {2, 3}) {
    const PointCloud cloud = random_cloud(rng, dim, 300, 2.0);
    const double s = 2.5;
    PointCloud scaled(dim);
    for (std::size_t i = 0; i < cloud.size(); ++i)
      scaled.add(cloud.point(i) * s);

    CoralParams params;
    params.r_min = 0.7;
    CoralParams scaled_params = params;
    scaled_params.r_min = params.r_min * s;
    scaled_params.r_max = params.r_max * s;

    const NeighborhoodIndex i1(cloud, params.query_radius_bound());
    const NeighborhoodIndex i2(scaled, scaled_params.query_radius_bound());
    const EntropyReport r1 =
        cloud_entropy(cloud, i1, {Eigen::Vector3d::Zero()}, params);
    const EntropyReport r2 =
        cloud_entropy(scaled, i2, {Eigen::Vector3d::Zero()}, scaled_params);
    CHECK(r2.H_agg ==
          doctest::Approx(r1.H_agg + dim * std::log(s)).epsilon(1e-9));
  }
}

TEST_CASE("quality is invariant under a rigid motion of both clouds") {
  std::mt19937_64 rng(47);
  const PointCloud a = random_cloud(rng, 3, 300, 2.0);
  const PointCloud b = random_cloud(rng, 3, 300, 2.0);
  CoralParams params;
  params.r_min = 0.6;
  const RigidTransform t(
      3, Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.2, -1.0, 0.4).normalized())
             .toRotationMatrix(),
      Eigen::Vector3d(10, -3, 2));
  const QualityResult before = coral_quality(a, b, params);
  const QualityResult after =
      coral_quality(apply_transform(a, t), apply_transform(b, t), params);
  CHECK(after.Q == doctest::Approx(before.Q).epsilon(1e-8));
}

TEST_CASE("per-point quality is joint minus separate entropy") {
  std::mt19937_64 rng(53);
  const PointCloud a = random_cloud(rng, 2, 300, 2.0);
  const PointCloud b = random_cloud(rng, 2, 300, 2.0);
  CoralParams params;
  params.r_min = 0.5;
  const QualityResult q = coral_quality(a, b, params);
  REQUIRE(q.per_point_quality.size() == a.size() + b.size());
  for (std::size_t k = 0; k < q.per_point_quality.size(); ++k) {
    if (!q.quality_valid[k]) continue;
    CHECK(q.per_point_quality[k] ==
          q.joint.per_point_entropy[k] - q.separate.per_point_entropy[k]);
  }
}

TEST_CASE("misalignment raises the joint entropy") {
  std::mt19937_64 rng(59);
  // Two noisy samplings of the same plane; a vertical offset inflates the
  // joint neighborhoods without touching the separate ones.
  auto plane = [&rng](double z_shift) {
    std::uniform_real_distribution<double> xy(-4.0, 4.0);
    std::normal_distribution<double> nz(0.0, 0.02);
    PointCloud c(3);
    for (int i = 0; i < 3000; ++i)
      c.add(xy(rng), xy(rng), nz(rng) + z_shift);
    c.set_origin({0, 0, 2.0});
    return c;
  };
  const PointCloud a = plane(0.0);
  const PointCloud b_aligned = plane(0.0);
  const PointCloud b_off = plane(0.15);
  CoralParams params;
  params.r_min = 0.5;
  const double q_aligned = coral_quality(a, b_aligned, params).Q;
  const double q_off = coral_quality(a, b_off, params).Q;
  CHECK(q_off > q_aligned + 0.15);
  // A small positive residual remains even when aligned: the joint fit uses
  // twice the samples, so its covariance estimate is less biased low.
  CHECK(std::abs(q_aligned) < 0.15);
}

TEST_CASE("separability ratio handles sign corner cases") {
  QualityResult al, mis;
  al.Q = 0.02;
  mis.Q = 0.5;
  CHECK(quality_separability(al, mis) == doctest::Approx(25.0));
  al.Q = -0.01;
  CHECK(std::isinf(quality_separability(al, mis)));
  mis.Q = -0.3;
  CHECK(std::isnan(quality_separability(al, mis)));
}

TEST_CASE("coral feature vector carries both entropies") {
  std::mt19937_64 rng(61);
  const PointCloud a = random_cloud(rng, 2, 200, 2.0);
  const PointCloud b = random_cloud(rng, 2, 200, 2.0);
  CoralParams params;
  params.r_min = 0.5;
  const QualityFeatureVector f = coral_features(a, b, params);
  const QualityResult q = coral_quality(a, b, params);
  CHECK(f.arity == 2);
  CHECK(f.x1 == q.H_joint);
  CHECK(f.x2 == q.H_sep);
}

TEST_CASE("invalid parameters are rejected") {
  CoralParams p;
  p.r_min = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.r_max = 0.1;  // below r_min
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.e_reject = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
