#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "symquot/polynomial.hpp"
#include "symquot/quotient_geometry.hpp"
#include "symquot/rng.hpp"

namespace symquot {

/// Non-homogeneous KSS polynomial in m variables of degree d:
/// sum over |alpha| <= d of xi_alpha sqrt(d! / (alpha! (d-|alpha|)!)) z^alpha.
/// Coefficients are drawn in lexicographic order of alpha (alpha_1 slowest).
/// With `homogeneous`, only |alpha| = d is sampled.
MultiPoly sample_nhkss(std::size_t m, int d, RngStream& rng, bool homogeneous = false);

/// Kac: all n+1 coefficients standard normal. Monic: t^n plus n standard
/// normal lower coefficients. Coefficients are drawn in ascending degree.
MultiPoly sample_univariate(UnivariateEnsemble ensemble, int n, RngStream& rng);

inline constexpr double kFactorialBudget = 1e7;

/// Average of q over all permutations of its variables.
MultiPoly reynolds_symmetrize(const MultiPoly& q);

/// Average over permutations of particles, where the variables are grouped
/// particle-major into blocks of `block` coordinates.
MultiPoly reynolds_symmetrize_blocks(const MultiPoly& q, std::size_t block);

enum class Construction { reynolds, quotient, explicit_poly };
enum class CoerciveSpace { config, quotient };
enum class ConstraintKind { none, x_sphere, es_sphere };

std::string to_string(Construction c);
std::string to_string(CoerciveSpace s);
std::string to_string(ConstraintKind k);
ConstraintKind constraint_from_string(const std::string& s);

struct CoerciveSpec {
  CoerciveSpace space = CoerciveSpace::config;
  double c = 1.0;
  std::optional<int> exponent;  // the full even power 2k; empty = auto
};

struct LandscapeRecipe {
  Construction construction = Construction::reynolds;
  int n = 3;       // particles (variables when particle_dim = 1)
  int degree = 3;
  std::optional<CoerciveSpec> coercive;
  ConstraintKind constraint = ConstraintKind::none;
  std::uint64_t seed = 0;
  int count = 1;
  bool homogeneous = false;
  int particle_dim = 1;
  /// Only for construction = explicit_poly.
  std::optional<MultiPoly> explicit_base;
  bool explicit_in_quotient = false;

  nlohmann::json to_json() const;
  static LandscapeRecipe from_json(const nlohmann::json& j);
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Smallest even integer strictly greater than d.
int auto_coercive_exponent(int d);

/// A realized invariant objective f on R^{n * particle_dim}.
class Landscape {
 public:
  const LandscapeRecipe& recipe() const { return recipe_; }
  std::size_t index() const { return index_; }
  std::size_t dim() const { return dim_; }
  ConstraintKind constraint() const { return recipe_.constraint; }

  /// The sampled Q (Reynolds) or P (quotient), before any coercive term.
  const MultiPoly& base() const { return base_; }
  /// Reynolds/explicit config: full f. Quotient: f~ on Y including any
  /// quotient-space coercive term.
  const MultiPoly& objective() const { return objective_; }
  bool is_quotient() const { return quotient_; }
  std::optional<int> coercive_exponent() const { return coercive_exponent_; }

  double value(std::span<const double> x) const;
  Jet jet(std::span<const double> x, int order = 2) const;

  /// f as a single polynomial in configuration variables.
  MultiPoly expanded(std::size_t term_cap = kDefaultComposeTermCap) const;

  nlohmann::json to_json() const;

  friend Landscape make_landscape(const LandscapeRecipe& recipe, std::size_t index);

 private:
  LandscapeRecipe recipe_;
  std::size_t index_ = 0;
  std::size_t dim_ = 0;
  bool quotient_ = false;
  MultiPoly base_;
  MultiPoly objective_;
  std::optional<int> coercive_exponent_;
  // Config-space coercive term added analytically in the quotient case.
  double config_coercive_c_ = 0.0;
  int config_coercive_exp_ = 0;
  std::shared_ptr<const PolyEvaluator> eval_;
};

/// Realizes landscape number `index` of a recipe. Random draws come from
/// RngStream(recipe.seed, index).split(0).
Landscape make_landscape(const LandscapeRecipe& recipe, std::size_t index = 0);

/// Explicit objective with optional constraint; handy for tests and tools.
Landscape explicit_landscape(const MultiPoly& f, ConstraintKind constraint = ConstraintKind::none);

}  // namespace symquot
