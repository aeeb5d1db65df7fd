#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "symquot/ensembles.hpp"
#include "symquot/rng.hpp"

namespace symquot {

struct SearchOptions {
  double eps_accept = 1e-1;
  double eps_polish = 1e-10;
  int max_iters = 200;
  double beta = 0.5;     // backtracking factor
  double armijo = 1e-4;  // sufficient decrease on |grad|^2
  double lambda_min = 1e-8;
  double max_condition = 1e12;
  double init_box = 2.0;
  double dedup_delta = 1e-2;
  double divergence_radius = 1e6;
  double morse_threshold = -1e-6;
  double constraint_tol = 1e-8;
  bool polish = true;
  int max_resamples = 100;
  unsigned jobs = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static SearchOptions from_json(const nlohmann::json& j);
};

struct CriticalPoint {
  std::vector<double> x;  // canonical representative (blocks sorted descending)
  double energy = 0.0;
  double grad_norm = 0.0;  // tangent gradient when constrained
  int morse_index = 0;
  long long stabilizer_order = 1;
  int distinct_values = 0;
  bool boundary_flag = false;
  bool polished = false;
  double constraint_residual = 0.0;
};

/// Objective callback: value, gradient and Hessian up to `order`.
using Objective = std::function<Jet(std::span<const double>, int)>;

enum class NewtonStatus { converged, diverged, exhausted, nonfinite, stalled };

struct NewtonResult {
  Eigen::VectorXd x;
  double grad_norm = 0.0;
  int iterations = 0;
  NewtonStatus status = NewtonStatus::exhausted;
};

/// Damped, regularized Newton iteration on grad f = 0 until |grad| < target.
/// With stop_on_stall, a step whose line search finds no decrease ends the
/// solve with status stalled instead of taking the full step.
NewtonResult newton_solve(const Objective& f, Eigen::VectorXd x0, double target, const SearchOptions& opts,
                          bool stop_on_stall = false);

/// Accept at eps_accept, then polish to eps_polish. Returns nothing on
/// divergence or iteration exhaustion. The returned x is not canonicalized
/// and symmetry fields are left at their defaults.
std::optional<CriticalPoint> damped_newton(const Objective& f, std::span<const double> x0,
                                           const SearchOptions& opts = {});
std::optional<CriticalPoint> damped_newton(const Landscape& f, std::span<const double> x0,
                                           const SearchOptions& opts = {});

/// Constraint g(x) = 0 with its derivatives.
struct ConstraintJet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

ConstraintJet constraint_jet(ConstraintKind kind, std::span<const double> x);

/// Moves x onto the manifold along its ray. Returns nothing where the ray
/// does not meet the manifold.
std::optional<Eigen::VectorXd> retract(ConstraintKind kind, const Eigen::VectorXd& x);

/// KKT Newton with retraction. Returns nothing on failure, including a
/// vanishing constraint gradient.
std::optional<CriticalPoint> constrained_newton(const Objective& f, std::span<const double> x0,
                                                ConstraintKind manifold, const SearchOptions& opts = {});
std::optional<CriticalPoint> constrained_newton(const Landscape& f, std::span<const double> x0,
                                                ConstraintKind manifold, const SearchOptions& opts = {});

/// Count of Hessian eigenvalues below opts.morse_threshold; for a manifold,
/// of the Lagrangian Hessian restricted to the tangent space.
int morse_index(const Objective& f, std::span<const double> x, ConstraintKind manifold = ConstraintKind::none,
                const SearchOptions& opts = {});
int morse_index(const Landscape& f, std::span<const double> x, const SearchOptions& opts = {});

/// Blocks of `block` coordinates sorted descending lexicographically.
std::vector<double> canonicalize(std::span<const double> x, std::size_t block = 1);

struct DedupClass {
  std::size_t representative = 0;  // index of the member with lowest grad_norm
  std::vector<std::size_t> members;
  std::vector<double> canonical;   // canonical form of the first member
};

/// Greedy single-linkage in arrival order on canonical forms under the max
/// norm. A point joins the first class holding a member within delta.
std::vector<DedupClass> dedup_by_permutation(const std::vector<std::vector<double>>& points, double delta,
                                             std::span<const double> grad_norms = {}, std::size_t block = 1);

struct SurveyPoint {
  double t = 0.0;
  CriticalPoint point;
};

struct SurveyResult {
  nlohmann::json recipe;
  std::size_t landscape_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  SearchOptions options;
  std::size_t n_starts = 0;
  std::vector<SurveyPoint> points;  // energy ascending
  std::size_t raw_hits = 0;
  std::size_t dedup_count = 0;
  std::size_t failed_starts = 0;
  std::size_t resampled_starts = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Start i draws from rng.split(i): uniform in [-init_box, init_box]^dim,
/// retracted onto the landscape's constraint manifold when it has one.
SurveyResult survey(const Landscape& f, std::size_t n_starts, const RngStream& rng,
                    const SearchOptions& opts = {});

/// Objective on the stratum x = A z, with A the dim x r embedding.
Objective restricted_objective(const Landscape& f, const Eigen::MatrixXd& embedding);

struct CalibrationResult {
  int runs = 0;
  int asymmetric = 0;
  int failed_starts = 0;
  double fraction = 0.0;
  double std_error = 0.0;
  double capacity_ratio = 0.0;  // predicted symmetric fraction
  std::vector<long long> stabilizer_orders;

  nlohmann::json to_json() const;
};

/// Repeats `runs` single-start searches, each on a fresh Reynolds landscape
/// of n particles with k coordinates and degree d. Run r uses landscape r of
/// the recipe; starts draw from RngStream(seed, r).split(1 + attempt) and are
/// retried until one converges.
CalibrationResult calibrate(int n, int k, int d, int runs, std::uint64_t seed, const SearchOptions& opts = {});

}  // namespace symquot
