#include "symquot/shape_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "symquot/error.hpp"
#include "symquot/io.hpp"

namespace symquot {

Configuration center(const Eigen::MatrixXd& points) {
  if (points.rows() < 1) throw std::invalid_argument("center: need at least one particle");
  Configuration cfg;
  cfg.coords = points.rowwise() - points.colwise().mean();
  cfg.centered = true;
  return cfg;
}

double lj_pair(double z) {
  const double z3 = z * z * z;
  return 1.0 / (z3 * z3) - 1.0 / z3;
}

Complex lj_pair(Complex z) {
  const Complex z3 = z * z * z;
  return 1.0 / (z3 * z3) - 1.0 / z3;
}

namespace {

[[noreturn]] void collision(std::size_t i, std::size_t j) {
  throw NumericalError("singular pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

}  // namespace

double lj_energy(const Configuration& cfg) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < cfg.coords.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < cfg.coords.rows(); ++j) {
      const double z = (cfg.coords.row(i) - cfg.coords.row(j)).squaredNorm();
      if (std::abs(z) <= kCollisionThreshold) collision(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      e += lj_pair(z);
    }
  }
  return e;
}

Complex lj_energy(const ComplexConfiguration& cfg) {
  Complex e = 0.0;
  for (Eigen::Index i = 0; i < cfg.coords.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < cfg.coords.rows(); ++j) {
      const Eigen::RowVectorXcd diff = cfg.coords.row(i) - cfg.coords.row(j);
      const Complex z = (diff.array() * diff.array()).sum();
      if (std::abs(z) <= kCollisionThreshold) collision(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      e += lj_pair(z);
    }
  }
  return e;
}

Eigen::MatrixXd optimal_alignment(const Configuration& a, const Configuration& b, bool proper_only) {
  if (a.n() != b.n() || a.d() != b.d()) throw std::invalid_argument("rmsd: dimension mismatch");
  // Maximize tr(R^T B^T A): R = U V^T from the SVD of B^T A.
  const Eigen::MatrixXd cov = b.coords.transpose() * a.coords;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd U = svd.matrixU();
  const Eigen::MatrixXd V = svd.matrixV();
  if (proper_only && (U * V.transpose()).determinant() < 0.0) U.col(U.cols() - 1) *= -1.0;
  return U * V.transpose();
}

double rmsd(const Configuration& a, const Configuration& b, bool proper_only) {
  const Eigen::MatrixXd R = optimal_alignment(a, b, proper_only);
  return (a.coords - b.coords * R).norm();
}

Configuration permute(const Configuration& cfg, const std::vector<int>& perm) {
  if (perm.size() != cfg.n()) throw std::invalid_argument("permute: size mismatch");
  Configuration out = cfg;
  for (std::size_t i = 0; i < perm.size(); ++i) out.coords.row(static_cast<Eigen::Index>(i)) = cfg.coords.row(perm[i]);
  return out;
}

// --- isotropy ----------------------------------------------------------------------

namespace {

constexpr std::size_t kSearchNodeBudget = 50'000'000;

struct IsotropyAccumulator {
  const Configuration& cfg;
  double tol;
  IsotropyReport report;

  void test(const std::vector<int>& perm) {
    ++report.candidates_tested;
    const Configuration moved = permute(cfg, perm);
    const bool vertex = (moved.coords - cfg.coords).cwiseAbs().maxCoeff() <= tol;
    const bool edge = rmsd(moved, cfg) <= tol;
    if (vertex) ++report.vertex_order;
    if (edge) {
      ++report.edge_order;
      if (report.witnesses.size() < kWitnessCap) report.witnesses.push_back(perm);
    }
    if (vertex && !edge) report.inclusion_holds = false;
  }
};

}  // namespace

IsotropyReport isotropy(const Configuration& cfg, double tol) {
  const std::size_t n = cfg.n();
  if (n == 0) throw std::invalid_argument("isotropy: empty configuration");
  Configuration c = cfg.centered ? cfg : center(cfg.coords);
  IsotropyAccumulator acc{c, tol, {}};

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.coords);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  const Eigen::Index rank = smax > 0.0 ? (sv.array() > 1e-9 * smax).count() : 0;
  acc.report.rank_deficient = static_cast<std::size_t>(rank) < std::min(n - 1, c.d());

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n <= kExhaustiveIsotropyLimit) {
    do {
      acc.test(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc.report;
  }

  acc.report.exhaustive = false;
  Eigen::MatrixXd D(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) D(i, j) = (c.coords.row(i) - c.coords.row(j)).norm();
  }
  std::vector<std::vector<double>> profile(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) profile[i].push_back(D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    std::sort(profile[i].begin(), profile[i].end());
  }
  std::vector<std::vector<int>> candidates(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      bool same = true;
      for (std::size_t k = 0; k < n && same; ++k) same = std::abs(profile[i][k] - profile[j][k]) <= tol;
      if (same) candidates[i].push_back(static_cast<int>(j));
    }
  }

  std::vector<bool> used(n, false);
  std::size_t nodes = 0;
  std::function<void(std::size_t)> extend = [&](std::size_t i) {
    if (++nodes > kSearchNodeBudget) {
      std::size_t total = 0;
      for (const auto& cand : candidates) total += cand.size();
      throw NumericalError("isotropy: enumeration budget exceeded (" + std::to_string(total) +
                           " per-particle candidates)");
    }
    if (i == n) {
      acc.test(perm);
      return;
    }
    for (int j : candidates[i]) {
      if (used[static_cast<std::size_t>(j)]) continue;
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k) {
        ok = std::abs(D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) - D(j, perm[k])) <= tol;
      }
      if (!ok) continue;
      perm[i] = j;
      used[static_cast<std::size_t>(j)] = true;
      extend(i + 1);
      used[static_cast<std::size_t>(j)] = false;
    }
  };
  extend(0);
  return acc.report;
}

// --- dive --------------------------------------------------------------------------

double dive_constant() {
  const double c = std::cos(std::numbers::pi / 12.0);
  return std::pow(4.0 * c * c, -6.0);
}

DiveReport unbounded_dive(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("unbounded_dive: rho must be positive");
  const double s = std::sqrt(rho);
  const double u = s * std::cos(std::numbers::pi / 12.0);
  const double v = s * std::sin(std::numbers::pi / 12.0);
  ComplexConfiguration cfg;
  cfg.coords = Eigen::MatrixXcd::Zero(3, 3);
  cfg.coords(0, 0) = Complex(u, v);
  cfg.coords(1, 0) = Complex(-u, v);
  auto sq = [&](int i, int j) {
    const Eigen::RowVectorXcd d = cfg.coords.row(i) - cfg.coords.row(j);
    return Complex((d.array() * d.array()).sum());
  };
  DiveReport r;
  r.rho = rho;
  r.r12_sq = sq(0, 1);
  r.r13_sq = sq(0, 2);
  r.r23_sq = sq(1, 2);
  r.energy = lj_energy(cfg);
  r.scaled_energy = r.energy.real() * std::pow(rho, 6);
  r.predicted = -(2.0 - dive_constant());
  return r;
}

// --- xyz_energy files --------------------------------------------------------------

namespace {

bool parse_double(std::string_view tok, double& out) {
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> energy_from_comment(std::string_view comment, const std::string& where) {
  const auto pos = comment.find("energy=");
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = comment.substr(pos + 7);
  const auto toks = tokens(rest);
  double v = 0.0;
  if (toks.empty() || rest.empty() || std::isspace(static_cast<unsigned char>(rest.front())) || !parse_double(toks[0], v)) {
    throw InputError(where + ": malformed energy field");
  }
  return v;
}

}  // namespace

std::vector<LoadedConfiguration> parse_configurations(const std::string& text, const std::string& source) {
  std::vector<std::string_view> lines;
  {
    std::string_view all(text);
    std::size_t start = 0;
    while (start < all.size()) {
      std::size_t end = all.find('\n', start);
      if (end == std::string_view::npos) end = all.size();
      std::string_view line = all.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = end + 1;
    }
  }
  auto where = [&](std::size_t idx) { return source + ":" + std::to_string(idx + 1); };

  std::vector<LoadedConfiguration> out;
  std::size_t i = 0;
  std::size_t dim = 0;
  while (i < lines.size()) {
    const auto head = tokens(lines[i]);
    if (head.empty()) {
      ++i;
      continue;
    }
    std::size_t n = 0;
    {
      auto [p, ec] = std::from_chars(head[0].data(), head[0].data() + head[0].size(), n);
      if (head.size() != 1 || ec != std::errc() || p != head[0].data() + head[0].size() || n == 0) {
        throw InputError(where(i) + ": expected a positive particle count");
      }
    }
    LoadedConfiguration block;
    block.line = i + 1;
    if (i + 1 >= lines.size()) throw InputError(where(i) + ": missing comment line");
    block.comment = std::string(lines[i + 1]);
    block.energy = energy_from_comment(lines[i + 1], where(i + 1));
    if (i + 1 + n >= lines.size()) throw InputError(where(lines.size() - 1) + ": block truncated, expected " +
                                                    std::to_string(n) + " coordinate lines");
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t li = i + 2 + r;
      auto toks = tokens(lines[li]);
      double probe = 0.0;
      if (!toks.empty() && !parse_double(toks[0], probe)) toks.erase(toks.begin());  // atom label
      if (toks.empty()) throw InputError(where(li) + ": expected coordinates");
      std::vector<double> row;
      for (auto t : toks) {
        double v = 0.0;
        if (!parse_double(t, v)) throw InputError(where(li) + ": cannot parse '" + std::string(t) + "' as a number");
        row.push_back(v);
      }
      if (dim == 0) dim = row.size();
      if (row.size() != dim) {
        throw InputError(where(li) + ": expected " + std::to_string(dim) + " coordinates, got " + std::to_string(row.size()));
      }
      rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    block.cfg = center(m);
    out.push_back(std::move(block));
    i += 2 + n;
  }
  if (out.empty()) throw InputError(source + ": no configuration blocks");
  return out;
}

std::vector<LoadedConfiguration> load_configurations(const std::filesystem::path& path) {
  return parse_configurations(read_text_file(path), path.string());
}

std::string format_configurations(const std::vector<LoadedConfiguration>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    out += std::to_string(b.cfg.n()) + "\n";
    std::string comment = b.comment;
    if (b.energy && comment.find("energy=") == std::string::npos) {
      comment = "energy=" + format_number(*b.energy) + (comment.empty() ? "" : " " + comment);
    }
    out += comment + "\n";
    for (Eigen::Index r = 0; r < b.cfg.coords.rows(); ++r) {
      for (Eigen::Index c = 0; c < b.cfg.coords.cols(); ++c) {
        if (c) out += ' ';
        out += format_number(b.cfg.coords(r, c));
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace symquot
