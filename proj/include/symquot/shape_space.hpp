#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symquot/polynomial.hpp"

namespace symquot {

/// n labeled particles in R^d, one per row.
struct Configuration {
  Eigen::MatrixXd coords;
  bool centered = false;

  std::size_t n() const { return static_cast<std::size_t>(coords.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(coords.cols()); }
};

struct ComplexConfiguration {
  Eigen::MatrixXcd coords;

  std::size_t n() const { return static_cast<std::size_t>(coords.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(coords.cols()); }
};

/// Subtracts the mean row.
Configuration center(const Eigen::MatrixXd& points);

inline constexpr double kCollisionThreshold = 1e-12;

/// phi(z) = 1/z^6 - 1/z^3 on the squared distance z.
double lj_pair(double z);
Complex lj_pair(Complex z);

/// Sum over pairs of phi(<x_i - x_j, x_i - x_j>). The complex version uses
/// the symmetric bilinear form without conjugation. Throws NumericalError
/// "singular pair (i,j)" when |z| <= 1e-12.
double lj_energy(const Configuration& cfg);
Complex lj_energy(const ComplexConfiguration& cfg);

/// Orthogonal R minimizing ||a - b R|| for row-wise configurations. Improper
/// rotations are admitted unless `proper_only`.
Eigen::MatrixXd optimal_alignment(const Configuration& a, const Configuration& b, bool proper_only = false);

/// min over R in O(d) of the Frobenius distance ||a - b R||.
double rmsd(const Configuration& a, const Configuration& b, bool proper_only = false);

/// Rows permuted: row i of the result is row perm[i] of cfg.
Configuration permute(const Configuration& cfg, const std::vector<int>& perm);

struct IsotropyReport {
  long long vertex_order = 0;
  long long edge_order = 0;
  std::vector<std::vector<int>> witnesses;  // edge isotropy permutations (capped)
  bool inclusion_holds = true;              // every vertex permutation is an edge permutation
  bool rank_deficient = false;              // affine span below min(n - 1, d)
  bool exhaustive = true;
  std::size_t candidates_tested = 0;
};

inline constexpr double kIsotropyTolerance = 1e-6;
inline constexpr std::size_t kExhaustiveIsotropyLimit = 8;
inline constexpr std::size_t kWitnessCap = 1000;

/// Exhaustive over S_n for n <= 8; above that, a backtracking search over
/// permutations preserving all pairwise distances, seeded by per-particle
/// sorted distance lists, followed by the RMSD test.
IsotropyReport isotropy(const Configuration& cfg, double tol = kIsotropyTolerance);

struct DiveReport {
  double rho = 0.0;
  Complex energy;
  double scaled_energy = 0.0;  // Re(energy) * rho^6
  double predicted = 0.0;      // -(2 - C)
  Complex r12_sq, r13_sq, r23_sq;
};

/// C = (4 cos^2(pi/12))^{-6}
double dive_constant();

/// Complex three-particle trajectory driving the LJ energy to -infinity.
DiveReport unbounded_dive(double rho);

struct LoadedConfiguration {
  Configuration cfg;
  std::optional<double> energy;
  std::string comment;
  std::size_t line = 0;  // 1-based line of the count line
};

/// xyz_energy blocks: a count line n, a comment line optionally holding
/// "energy=<float>", then n lines of d floats, optionally preceded by an
/// atom label. Configurations are centered. Throws InputError with the line
/// number on malformed input and "no configuration blocks" on empty input.
std::vector<LoadedConfiguration> parse_configurations(const std::string& text, const std::string& source = "<input>");
std::vector<LoadedConfiguration> load_configurations(const std::filesystem::path& path);

std::string format_configurations(const std::vector<LoadedConfiguration>& blocks);

}  // namespace symquot
