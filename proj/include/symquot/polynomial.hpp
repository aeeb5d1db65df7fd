#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace symquot {

using Exponent = std::vector<std::uint16_t>;
using Complex = std::complex<double>;

enum class Field { real, complex };

/// Sparse multivariate polynomial with real coefficients.
///
/// Terms are kept sorted lexicographically by exponent, with no zero
/// coefficients stored, so two polynomials compare equal exactly when their
/// term maps do. Instances are immutable once built.
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(std::size_t num_vars);

  static MultiPoly constant(std::size_t num_vars, double c);
  static MultiPoly variable(std::size_t num_vars, std::size_t index);
  static MultiPoly monomial(Exponent alpha, double c);
  /// Merges duplicate exponents by summation and drops zero coefficients.
  static MultiPoly from_terms(std::size_t num_vars,
                              std::vector<std::pair<Exponent, double>> terms);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t term_count() const { return coeffs_.size(); }
  bool is_zero() const { return coeffs_.empty(); }
  /// Total degree; empty for the zero polynomial.
  std::optional<int> degree() const;
  /// Largest exponent of each variable over all terms.
  std::vector<int> max_exponents() const;

  std::span<const std::uint16_t> exponent(std::size_t term) const {
    return {exps_.data() + term * num_vars_, num_vars_};
  }
  double coefficient(std::size_t term) const { return coeffs_[term]; }
  double coefficient_of(std::span<const std::uint16_t> alpha) const;

  double eval(std::span<const double> x) const;
  Complex eval(std::span<const Complex> x) const;

  MultiPoly derivative(std::size_t var) const;
  MultiPoly pow(unsigned k) const;
  /// Reindex variables: variable i of this polynomial becomes variable
  /// perm[i] of the result.
  MultiPoly permute_variables(std::span<const std::size_t> perm) const;

  MultiPoly operator-() const;
  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(double s, const MultiPoly& p);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) = default;

 private:
  friend class TermBuilder;
  template <class T>
  T eval_impl(std::span<const T> x) const;

  std::size_t num_vars_ = 0;
  std::vector<std::uint16_t> exps_;  // term-major, num_vars_ per term
  std::vector<double> coeffs_;
};

/// Accumulates (exponent, coefficient) pairs and produces a normalized
/// MultiPoly. Used by every operation that expands products.
class TermBuilder {
 public:
  explicit TermBuilder(std::size_t num_vars) : num_vars_(num_vars) {}
  void add(std::span<const std::uint16_t> alpha, double c);
  std::size_t size() const { return coeffs_.size(); }
  MultiPoly build();

 private:
  std::size_t num_vars_;
  std::vector<std::uint16_t> exps_;
  std::vector<double> coeffs_;
};

struct Derivatives {
  std::vector<MultiPoly> grad;
  std::vector<std::vector<MultiPoly>> hess;  // symmetric
};

/// Exact symbolic gradient and Hessian.
Derivatives derivatives(const MultiPoly& p);

inline constexpr std::size_t kDefaultComposeTermCap = 2'000'000;

/// P(subs_1, ..., subs_k) expanded in the common variables of subs.
/// Throws NumericalError if any intermediate exceeds term_cap terms.
MultiPoly compose(const MultiPoly& outer, std::span<const MultiPoly> subs,
                  std::size_t term_cap = kDefaultComposeTermCap);

/// (x_1^2 + ... + x_m^2)^k
MultiPoly norm_power(std::size_t num_vars, unsigned k);

nlohmann::json to_json(const MultiPoly& p);
MultiPoly poly_from_json(const nlohmann::json& j);

/// Value, gradient and Hessian of a polynomial at a point.
struct Jet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// Nested-Horner form of a MultiPoly for repeated evaluation of value,
/// gradient and Hessian. Terms are arranged in a trie keyed on the exponent
/// of x_1, then x_2, and so on; each trie level carries a jet in the
/// variables below it, so most work happens on small jets near the leaves.
class PolyEvaluator {
 public:
  explicit PolyEvaluator(const MultiPoly& p);

  std::size_t num_vars() const { return num_vars_; }
  double value(std::span<const double> x) const;
  /// order 0: value only, 1: + gradient, 2: + Hessian.
  Jet jet(std::span<const double> x, int order = 2) const;

 private:
  struct Edge {
    std::uint32_t child;  // node at the next level, or a coefficient index below the last
    std::uint16_t exp;
  };
  struct Level {
    std::vector<std::uint32_t> offsets;  // node i owns edges [offsets[i], offsets[i+1])
    std::vector<Edge> edges;
  };

  void build(const MultiPoly& p, std::size_t level, std::size_t lo, std::size_t hi);

  std::size_t num_vars_ = 0;
  std::vector<int> max_exp_;
  std::vector<Level> levels_;
  std::vector<double> coeffs_;
};

}  // namespace symquot
