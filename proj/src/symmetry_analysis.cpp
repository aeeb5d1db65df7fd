#include "symquot/symmetry_analysis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "symquot/error.hpp"
#include "symquot/io.hpp"
#include "symquot/parallel.hpp"

namespace symquot {

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

StabilizerInfo from_clusters(std::vector<int> sizes) {
  std::sort(sizes.rbegin(), sizes.rend());
  StabilizerInfo info;
  info.partition = std::move(sizes);
  for (int s : info.partition) info.order *= factorial(s);
  return info;
}

}  // namespace

int distinct_values(std::span<const double> x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("distinct_values: delta must be positive");
  if (x.empty()) return 0;
  const auto v = sorted_copy(x);
  int d = 1;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] - v[i] > delta) ++d;
  }
  return d;
}

StabilizerInfo stabilizer_order(std::span<const double> x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("stabilizer_order: delta must be positive");
  if (x.empty()) return {};
  const auto v = sorted_copy(x);
  std::vector<int> sizes{1};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] - v[i] > delta) {
      sizes.push_back(1);
    } else {
      ++sizes.back();
    }
  }
  return from_clusters(std::move(sizes));
}

StabilizerInfo block_stabilizer(std::span<const double> x, std::size_t block, double delta) {
  if (block == 0 || x.size() % block != 0) throw std::invalid_argument("block_stabilizer: size not a multiple of block");
  if (block == 1) return stabilizer_order(x, delta);
  if (!(delta > 0.0)) throw std::invalid_argument("block_stabilizer: delta must be positive");
  const std::size_t n = x.size() / block;
  // Union-find over particles linked within delta.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = 0.0;
      for (std::size_t c = 0; c < block; ++c) dist = std::max(dist, std::abs(x[i * block + c] - x[j * block + c]));
      if (dist <= delta) parent[find(i)] = find(j);
    }
  }
  std::map<std::size_t, int> count;
  for (std::size_t i = 0; i < n; ++i) ++count[find(i)];
  std::vector<int> sizes;
  for (const auto& [root, c] : count) sizes.push_back(c);
  return from_clusters(std::move(sizes));
}

PointVerdict boundary_classify(long long order) {
  if (order < 1) throw std::invalid_argument("boundary_classify: order must be >= 1");
  return order % 2 == 0 ? PointVerdict::boundary : PointVerdict::interior;
}

// --- profiles ------------------------------------------------------------------------

SymmetryProfile symmetry_profile(std::span<const SurveyResult> surveys) {
  if (surveys.empty()) throw std::invalid_argument("symmetry_profile: empty ensemble");
  SymmetryProfile prof;
  prof.ensemble_size = surveys.size();
  prof.grid.resize(kProfileGrid);
  for (std::size_t g = 0; g < kProfileGrid; ++g) prof.grid[g] = static_cast<double>(g) / (kProfileGrid - 1);
  prof.mean_D.assign(kProfileGrid, 0.0);
  for (const auto& s : surveys) {
    if (s.points.empty()) throw std::invalid_argument("symmetry_profile: survey without points");
    const auto& pts = s.points;
    for (const auto& p : pts) {
      ++prof.distribution[p.point.distinct_values];
      ++prof.total_points;
    }
    for (std::size_t g = 0; g < kProfileGrid; ++g) {
      double value;
      if (pts.size() == 1) {
        value = pts[0].point.distinct_values;
      } else {
        const double t = prof.grid[g];
        // Segment [i, i+1] with t_i <= t <= t_{i+1}.
        std::size_t i = 0;
        while (i + 2 < pts.size() && pts[i + 1].t < t) ++i;
        const double t0 = pts[i].t, t1 = pts[i + 1].t;
        const double d0 = pts[i].point.distinct_values, d1 = pts[i + 1].point.distinct_values;
        const double w = t1 > t0 ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
        value = d0 + w * (d1 - d0);
      }
      prof.mean_D[g] += value;
    }
  }
  for (double& v : prof.mean_D) v /= static_cast<double>(surveys.size());
  prof.avg = std::accumulate(prof.mean_D.begin(), prof.mean_D.end(), 0.0) / kProfileGrid;
  prof.t0 = prof.mean_D.front();
  prof.t05 = prof.mean_D[kProfileGrid / 2];
  prof.t1 = prof.mean_D.back();
  return prof;
}

nlohmann::json SymmetryProfile::summary_json() const {
  nlohmann::json dist = nlohmann::json::object();
  for (const auto& [d, c] : distribution) {
    dist[std::to_string(d)] = static_cast<double>(c) / static_cast<double>(total_points);
  }
  return {{"avg", avg}, {"t0", t0}, {"t05", t05}, {"t1", t1},
          {"distribution", dist}, {"total_points", total_points}, {"ensemble_size", ensemble_size}};
}

std::string SymmetryProfile::to_csv() const {
  std::string out = csv_line({"t", "mean_D"});
  for (std::size_t g = 0; g < grid.size(); ++g) out += csv_line({format_number(grid[g]), format_number(mean_D[g])});
  return out;
}

DensityCurve moving_average_density(const std::vector<bool>& flags, std::size_t w) {
  if (w < 1) throw std::invalid_argument("moving_average_density: window must be >= 1");
  DensityCurve curve;
  const std::size_t n = flags.size();
  if (n == 0) return curve;
  const std::size_t W = std::min(w, n);
  curve.window = W;
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (flags[i] ? 1 : 0);
  curve.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t half = W / 2;
    std::size_t start = i >= half ? i - half : 0;
    start = std::min(start, n - W);
    curve.values[i] = static_cast<double>(prefix[start + W] - prefix[start]) / static_cast<double>(W);
  }
  curve.baseline = static_cast<double>(prefix[n]) / static_cast<double>(n);
  return curve;
}

std::string DensityCurve::to_csv() const {
  std::string out = csv_line({"rank", "t", "density"});
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out += csv_line({std::to_string(i), format_number(t), format_number(values[i])});
  }
  return out;
}

std::vector<SurveyResult> survey_ensemble(const LandscapeRecipe& recipe, std::size_t starts,
                                          const SearchOptions& opts) {
  recipe.validate();
  if (starts < 1) throw ConfigError("starts: must be >= 1");
  std::vector<SurveyResult> out(static_cast<std::size_t>(recipe.count));
  SearchOptions serial = opts;
  serial.jobs = 1;
  parallel_for(out.size(), opts.jobs, [&](std::size_t i) {
    const Landscape f = make_landscape(recipe, i);
    out[i] = survey(f, starts, RngStream(recipe.seed, i).split(1), serial);
  });
  return out;
}

}  // namespace symquot
