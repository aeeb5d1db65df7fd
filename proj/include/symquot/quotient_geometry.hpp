#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "symquot/polynomial.hpp"
#include "symquot/rng.hpp"

namespace symquot {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// --- elementary symmetric map ------------------------------------------------

/// Values (e_1, ..., e_n) of the elementary symmetric polynomials. Identified
/// with the monic polynomial t^n - e_1 t^{n-1} + ... + (-1)^n e_n.
struct QuotientPoint {
  std::vector<double> e;
  std::size_t n() const { return e.size(); }
};

QuotientPoint esp(std::span<const double> x);

/// e_1..e_n as MultiPolys in n variables.
std::vector<MultiPoly> esp_polynomials(std::size_t n);

/// esp values with first and second derivatives.
/// jacobian(k, i) = d e_{k+1} / d x_i, hessians[k](i, j) = d^2 e_{k+1} / dx_i dx_j.
struct EspJet {
  Eigen::VectorXd values;
  Eigen::MatrixXd jacobian;
  std::vector<Eigen::MatrixXd> hessians;
};

EspJet esp_jet(std::span<const double> x, int order = 2);

double esp_jacobian_det(std::span<const double> x);

/// Univariate monic polynomial whose roots are the preimage coordinates.
MultiPoly monic_polynomial(const QuotientPoint& y);

// --- real-rootedness ----------------------------------------------------------

enum class RootClass { all_real, not_all_real, boundary };

std::string to_string(RootClass c);

inline constexpr double kSturmTolerance = 1e-10;

/// Sturm-sequence classification of a univariate polynomial given by its
/// coefficients in ascending degree. `boundary` means all roots are real and
/// at least one is repeated. Throws NumericalError("ill-conditioned") if the
/// leading coefficient is below tol * max|coeff|.
RootClass is_real_rooted(std::span<const double> ascending_coeffs, double tol = kSturmTolerance);
RootClass is_real_rooted(const MultiPoly& p, double tol = kSturmTolerance);

enum class PointVerdict { interior, boundary, exterior };

std::string to_string(PointVerdict v);

struct BallThresholds {
  double low = 0.05;
  double high = 0.95;
};

struct BallClassification {
  PointVerdict verdict = PointVerdict::exterior;
  double real_fraction = 0.0;
  std::size_t samples = 0;
  /// False when the fraction falls in (0, low) or (high, 1), where the verdict
  /// is the nearer class but binomial noise could flip it.
  bool confident = true;
};

/// Ball test in coefficient space around y. Requires samples >= 100.
BallClassification classify_quotient_point(const QuotientPoint& y, double radius,
                                           std::size_t samples, RngStream& rng,
                                           BallThresholds thresholds = {});

// --- involutions and volume fractions -------------------------------------------

/// Telephone numbers via I(n) = I(n-1) + (n-1) I(n-2). Requires 0 <= n <= 500.
BigInt count_involutions(int n);
/// Same count via sum_k n! / (2^k k! (n-2k)!).
BigInt count_involutions_closed_form(int n);

/// All involutions of S_n (identity included) as image vectors, n <= 8.
std::vector<std::vector<int>> enumerate_involutions(int n);

struct RarityReport {
  std::string kind;  // "sn", "shape" or "stratum"
  Rational fraction;
  nlohmann::json inputs;

  double approx() const;
  double log10() const;
  nlohmann::json to_json() const;
};

RarityReport real_image_fraction_sn(int n);
RarityReport real_image_fraction_shape(int n, int d);
/// Partition of n given by block sizes. Effective group is the product of
/// S_{m_j} over block sizes j with multiplicity m_j.
RarityReport real_image_fraction_stratum(std::span<const int> partition);

/// Exact rational as JSON {num, den}; integers that fit in 64 bits are
/// emitted as numbers, larger ones as decimal strings.
nlohmann::json rational_json(const Rational& r);
std::string big_to_string(const BigInt& b);

// --- Monte-Carlo estimators --------------------------------------------------------

enum class UnivariateEnsemble { kac, monic_gaussian };

std::string to_string(UnivariateEnsemble e);
UnivariateEnsemble univariate_ensemble_from_string(const std::string& s);

struct ProbabilityEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t resampled = 0;
};

/// Trials are split into fixed blocks, block b drawing from rng.split(b), so
/// the estimate does not depend on `jobs`.
ProbabilityEstimate estimate_real_root_probability(UnivariateEnsemble ensemble, int degree,
                                                   std::size_t trials, const RngStream& rng,
                                                   unsigned jobs = 1);

struct AsymmetricBound {
  double log10 = 0.0;  // -inf when p_hat = 0
  double value = 0.0;  // n^n * p_hat, may be +inf when it overflows
};

AsymmetricBound expected_asymmetric_bound(int n, double p_hat);

/// Fraction of Kac polynomials on [-a, a] whose global minimum is at an endpoint.
ProbabilityEstimate kac_endpoint_minimum_probability(int degree, double a, std::size_t trials,
                                                     const RngStream& rng, unsigned jobs = 1);

/// Location of the global minimum of a univariate polynomial (ascending
/// coefficients) over [-a, a] via dense grid plus Newton polish.
double minimize_on_interval(std::span<const double> ascending_coeffs, double a);

// --- twisted sectors ------------------------------------------------------------------

struct SectorVolume {
  std::vector<int> involution;
  int fixed_dimension = 0;       // real dimension of Fix(sigma o conj)
  double transport_residual = 0; // max |conj(Tv) - sigma(Tv)| over basis vectors
  double unitarity_residual = 0; // ||T^H T - I||_max
  double gram_det = 0;
  double volume_scale = 0;       // sqrt(gram_det)
};

struct SectorReport {
  int n = 0;
  std::vector<SectorVolume> sectors;
  double identity_fraction = 0;  // identity volume / total
  /// 1 / #sectors when all volumes agree to 1e-10 relative.
  std::optional<Rational> identity_fraction_exact;
};

SectorReport sector_volume_check(int n);

// --- counting heuristic -----------------------------------------------------------------

double capacity_ratio(int n, int k, int d);
/// Exact value when (d-1)^{k/2} is rational, i.e. k even.
std::optional<Rational> capacity_ratio_exact(int n, int k, int d);
/// k = 1 degree at which the ratio reaches 1/2: 1 + n^2 (n-1)^2.
long long capacity_crossover_degree(int n);

}  // namespace symquot
