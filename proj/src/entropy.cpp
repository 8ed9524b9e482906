#include "coral/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "coral/kernels.hpp"

namespace coral {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

struct AggregateResult {
  double value = 0.0;
  std::size_t n_valid = 0;
  std::size_t n_used = 0;
};

AggregateResult aggregate_entropies(const std::vector<double>& h,
                                    const CoralParams& params) {
  // (entropy, index) pairs; index breaks ties in the rejection cut.
  std::vector<std::pair<double, std::size_t>> valid;
  valid.reserve(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!std::isnan(h[i])) valid.emplace_back(h[i], i);
  if (valid.empty()) throw DataError("no valid entropies");

  std::sort(valid.begin(), valid.end());
  const auto n_reject = static_cast<std::size_t>(
      std::floor(params.e_reject * static_cast<double>(valid.size())));
  const std::size_t n_used = valid.size() - n_reject;

  AggregateResult out;
  out.n_valid = valid.size();
  out.n_used = n_used;
  if (params.aggregate == CoralParams::Aggregate::kMedian) {
    const std::size_t lo = n_reject + (n_used - 1) / 2;
    const std::size_t hi = n_reject + n_used / 2;
    out.value = 0.5 * (valid[lo].first + valid[hi].first);
  } else {
    double sum = 0.0;
    for (std::size_t i = n_reject; i < valid.size(); ++i) sum += valid[i].first;
    out.value = sum / static_cast<double>(n_used);
  }
  return out;
}

// Canonical lexicographic (x,y,z) neighbor order: makes the accumulated
// moments independent of cloud concatenation order, so Q(A,B) == Q(B,A)
// bit-for-bit.
static void sort_neighbors(std::vector<double>& xs, std::vector<double>& ys,
                           std::vector<double>& zs, std::size_t n, int dim) {
  thread_local std::vector<std::uint32_t> perm;
  perm.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (xs[a] != xs[b]) return xs[a] < xs[b];
    if (ys[a] != ys[b]) return ys[a] < ys[b];
    return dim == 3 && zs[a] < zs[b];
  });
  thread_local std::vector<double> tmp;
  auto permute = [&](std::vector<double>& v) {
    tmp.resize(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v[perm[i]];
    std::copy(tmp.begin(), tmp.begin() + n, v.begin());
  };
  permute(xs);
  permute(ys);
  if (dim == 3) permute(zs);
}

}  // namespace

void CoralParams::validate() const {
  if (!(r_min > 0.0) || !(r_min <= r_max))
    throw ConfigError("require 0 < r_min <= r_max");
  if (alpha < 0.0 || alpha >= std::numbers::pi / 2.0)
    throw ConfigError("alpha must lie in [0, pi/2)");
  if (epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (e_reject < 0.0 || e_reject >= 1.0)
    throw ConfigError("e_reject must lie in [0, 1)");
}

double point_entropy(const double* xs, const double* ys, const double* zs,
                     std::size_t n, int dim, const CoralParams& params) {
  if (n < static_cast<std::size_t>(params.effective_min_neighbors(dim)))
    return kNaN;

  double det = 0.0;
  if (dim == 2) {
    const auto m = kernels::moments_2d(xs, ys, n);
    const double inv = 1.0 / m.n;
    const double mx = m.sx * inv, my = m.sy * inv;
    const double cxx = m.sxx * inv - mx * mx;
    const double cyy = m.syy * inv - my * my;
    const double cxy = m.sxy * inv - mx * my;
    det = cxx * cyy - cxy * cxy;
  } else {
    const auto m = kernels::moments_3d(xs, ys, zs, n);
    const double inv = 1.0 / m.n;
    const double mx = m.sx * inv, my = m.sy * inv, mz = m.sz * inv;
    const double cxx = m.sxx * inv - mx * mx;
    const double cyy = m.syy * inv - my * my;
    const double czz = m.szz * inv - mz * mz;
    const double cxy = m.sxy * inv - mx * my;
    const double cxz = m.sxz * inv - mx * mz;
    const double cyz = m.syz * inv - my * mz;
    det = cxx * (cyy * czz - cyz * cyz) - cxy * (cxy * czz - cyz * cxz) +
          cxz * (cxy * cyz - cyy * cxz);
  }

  const double scale = std::pow(kTwoPiE, dim);
  if (params.epsilon == 0.0) {
    if (det <= 0.0) return kNaN;
    return 0.5 * std::log(scale * det);
  }
  // Additive determinant floor; the lowest representable entropy becomes
  // 0.5*ln(epsilon) regardless of dimension.
  return 0.5 * std::log(scale * std::max(det, 0.0) + params.epsilon);
}

double effective_radius(const Eigen::Vector3d& p,
                        const Eigen::Vector3d& sensor_origin,
                        const CoralParams& params) {
  if (params.alpha == 0.0) return params.r_min;
  const double d = (p - sensor_origin).norm();
  return std::clamp(d * std::sin(params.alpha), params.r_min, params.r_max);
}

EntropyReport cloud_entropy(const PointCloud& target,
                            const NeighborhoodIndex& search,
                            const std::vector<Eigen::Vector3d>& origins,
                            const CoralParams& params) {
  params.validate();
  if (origins.size() != 1 && origins.size() != target.size())
    throw DataError("origins must have 1 or per-point entries");

  EntropyReport report;
  report.per_point_entropy.resize(target.size(), kNaN);
  report.valid.assign(target.size(), false);

  std::vector<double> nx, ny, nz;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const Eigen::Vector3d p = target.point(i);
    const Eigen::Vector3d& origin =
        origins.size() == 1 ? origins[0] : origins[i];
    const double r = effective_radius(p, origin, params);
    const std::size_t n = search.gather_neighbors(p, r, nx, ny, nz);
    sort_neighbors(nx, ny, nz, n, target.dim());
    const double h = point_entropy(nx.data(), ny.data(), nz.data(), n,
                                   target.dim(), params);
    report.per_point_entropy[i] = h;
    report.valid[i] = !std::isnan(h);
  }

  const AggregateResult agg =
      aggregate_entropies(report.per_point_entropy, params);
  report.H_agg = agg.value;
  report.n_valid = agg.n_valid;
  report.n_used = agg.n_used;
  return report;
}

QualityResult coral_quality(const PointCloud& a, const PointCloud& b,
                            const CoralParams& params) {
  params.validate();
  if (a.dim() != b.dim()) throw DataError("dim mismatch");
  if (a.empty() || b.empty()) throw DataError("empty cloud");
  const int dim = a.dim();
  const double cell = params.query_radius_bound();

  // Joint cloud: Pa followed by Pb, each point keeping its source origin.
  PointCloud joint(dim);
  joint.reserve(a.size() + b.size());
  std::vector<Eigen::Vector3d> joint_origins;
  joint_origins.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint.add(a.point(i));
    joint_origins.push_back(a.origin());
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    joint.add(b.point(i));
    joint_origins.push_back(b.origin());
  }

  const NeighborhoodIndex index_a = build_index(a, cell);
  const NeighborhoodIndex index_b = build_index(b, cell);
  const NeighborhoodIndex index_j = build_index(joint, cell);

  const EntropyReport sep_a = cloud_entropy(a, index_a, {a.origin()}, params);
  const EntropyReport sep_b = cloud_entropy(b, index_b, {b.origin()}, params);

  QualityResult result;
  // Separate pass: per-point entropies concatenated, then aggregated once so
  // the rejection cut and H_sep weighting span both clouds.
  result.separate.per_point_entropy = sep_a.per_point_entropy;
  result.separate.per_point_entropy.insert(
      result.separate.per_point_entropy.end(), sep_b.per_point_entropy.begin(),
      sep_b.per_point_entropy.end());
  result.separate.valid = sep_a.valid;
  result.separate.valid.insert(result.separate.valid.end(), sep_b.valid.begin(),
                               sep_b.valid.end());
  {
    const AggregateResult agg =
        aggregate_entropies(result.separate.per_point_entropy, params);
    result.separate.H_agg = agg.value;
    result.separate.n_valid = agg.n_valid;
    result.separate.n_used = agg.n_used;
  }

  result.joint = cloud_entropy(joint, index_j, joint_origins, params);

  result.H_joint = result.joint.H_agg;
  result.H_sep = result.separate.H_agg;
  result.Q = result.H_joint - result.H_sep;

  const std::size_t n = joint.size();
  result.per_point_quality.resize(n, kNaN);
  result.quality_valid.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (result.joint.valid[i] && result.separate.valid[i]) {
      result.per_point_quality[i] =
          result.joint.per_point_entropy[i] - result.separate.per_point_entropy[i];
      result.quality_valid[i] = true;
    }
  }
  return result;
}

double quality_separability(const QualityResult& aligned,
                            const QualityResult& misaligned) {
  const double qa = aligned.Q, qm = misaligned.Q;
  if (qa <= 0.0 && qm <= 0.0) return kNaN;
  if (qa <= 0.0) return std::numeric_limits<double>::infinity();
  return qm / qa;
}

QualityFeatureVector coral_features(const PointCloud& a, const PointCloud& b,
                                    const CoralParams& params) {
  const QualityResult q = coral_quality(a, b, params);
  return {q.H_joint, q.H_sep, 0.0, 2};
}

}  // namespace coral
