#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symquot/critical_search.hpp"
#include "symquot/quotient_geometry.hpp"

namespace symquot {

/// D(x) = 1 + #{i : x_(i+1) - x_(i) > delta} over the sorted coordinates.
int distinct_values(std::span<const double> x, double delta);

struct StabilizerInfo {
  long long order = 1;         // prod (cluster size)!
  std::vector<int> partition;  // cluster sizes, descending
};

/// Young stabilizer of the sorted-gap clustering used by distinct_values.
StabilizerInfo stabilizer_order(std::span<const double> x, double delta);

/// Same for particles: x holds consecutive blocks of `block` coordinates and
/// two particles are linked when their max-norm distance is <= delta.
/// With block = 1 this reduces to stabilizer_order.
StabilizerInfo block_stabilizer(std::span<const double> x, std::size_t block, double delta);

/// Boundary iff the stabilizer order is even. Returns interior or boundary.
PointVerdict boundary_classify(long long stabilizer_order);

inline constexpr std::size_t kProfileGrid = 101;

struct SymmetryProfile {
  std::vector<double> grid;
  std::vector<double> mean_D;
  double avg = 0.0;
  double t0 = 0.0;
  double t05 = 0.0;
  double t1 = 0.0;
  std::map<int, std::size_t> distribution;  // D value -> pooled count
  std::size_t total_points = 0;
  std::size_t ensemble_size = 0;

  nlohmann::json summary_json() const;
  std::string to_csv() const;
};

/// Per survey, D against t is linearly interpolated onto a 101-node grid;
/// the profile is the pointwise ensemble mean.
SymmetryProfile symmetry_profile(std::span<const SurveyResult> surveys);

/// Surveys landscapes 0 .. recipe.count - 1 with `starts` starts each.
/// Landscape i draws its starts from RngStream(recipe.seed, i).split(1).
/// Landscapes are spread over opts.jobs threads; each survey runs serially.
std::vector<SurveyResult> survey_ensemble(const LandscapeRecipe& recipe, std::size_t starts,
                                          const SearchOptions& opts = {});

struct DensityCurve {
  std::size_t window = 0;  // effective window, min(w, N)
  std::vector<double> values;
  double baseline = 0.0;  // mean over the whole sequence

  std::string to_csv() const;  // rank, t, density
};

/// Moving average of 0/1 flags with a window of min(w, N) entries. Windows
/// are centered where possible and shifted to stay inside the sequence at
/// the edges, so every value averages exactly that many entries.
DensityCurve moving_average_density(const std::vector<bool>& flags, std::size_t w);

}  // namespace symquot
