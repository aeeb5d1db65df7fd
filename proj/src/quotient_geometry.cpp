#include "symquot/quotient_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "symquot/ensembles.hpp"
#include "symquot/error.hpp"
#include "symquot/parallel.hpp"

namespace symquot {

// --- elementary symmetric map ------------------------------------------------

namespace {

// e_0..e_n of the given values (e_0 = 1).
std::vector<double> esp_with_unit(std::span<const double> x) {
  std::vector<double> e(x.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += x[i] * e[k - 1];
  }
  return e;
}

}  // namespace

QuotientPoint esp(std::span<const double> x) {
  auto e = esp_with_unit(x);
  return {std::vector<double>(e.begin() + 1, e.end())};
}

std::vector<MultiPoly> esp_polynomials(std::size_t n) {
  std::vector<MultiPoly> e(n + 1, MultiPoly(n));
  e[0] = MultiPoly::constant(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = MultiPoly::variable(n, i);
    for (std::size_t k = i + 1; k >= 1; --k) e[k] = e[k] + xi * e[k - 1];
  }
  e.erase(e.begin());
  return e;
}

EspJet esp_jet(std::span<const double> x, int order) {
  const std::size_t n = x.size();
  const auto N = static_cast<Eigen::Index>(n);
  EspJet jet;
  auto full = esp_with_unit(x);
  jet.values = Eigen::Map<const Eigen::VectorXd>(full.data() + 1, N);
  if (order < 1) return jet;

  // d e_k / d x_i = e_{k-1}(x without x_i)
  jet.jacobian = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> rest;
  rest.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rest.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) rest.push_back(x[j]);
    }
    auto er = esp_with_unit(rest);
    for (std::size_t k = 1; k <= n; ++k) jet.jacobian(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(i)) = er[k - 1];
  }
  if (order < 2) return jet;

  // d^2 e_k / dx_i dx_j = e_{k-2}(x without x_i, x_j), zero on the diagonal.
  jet.hessians.assign(n, Eigen::MatrixXd::Zero(N, N));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      rest.clear();
      for (std::size_t l = 0; l < n; ++l) {
        if (l != i && l != j) rest.push_back(x[l]);
      }
      auto er = esp_with_unit(rest);
      for (std::size_t k = 2; k <= n; ++k) {
        auto& h = jet.hessians[k - 1];
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = er[k - 2];
        h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = er[k - 2];
      }
    }
  }
  return jet;
}

double esp_jacobian_det(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("esp_jacobian_det: empty point");
  return esp_jet(x, 1).jacobian.partialPivLu().determinant();
}

MultiPoly monic_polynomial(const QuotientPoint& y) {
  const std::size_t n = y.n();
  TermBuilder b(1);
  b.add(std::vector<std::uint16_t>{static_cast<std::uint16_t>(n)}, 1.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    b.add(std::vector<std::uint16_t>{static_cast<std::uint16_t>(n - k)}, sign * y.e[k - 1]);
  }
  return b.build();
}

// --- real-rootedness ----------------------------------------------------------

std::string to_string(RootClass c) {
  switch (c) {
    case RootClass::all_real: return "all_real";
    case RootClass::not_all_real: return "not_all_real";
    case RootClass::boundary: return "boundary";
  }
  return "?";
}

std::string to_string(PointVerdict v) {
  switch (v) {
    case PointVerdict::interior: return "interior";
    case PointVerdict::boundary: return "boundary";
    case PointVerdict::exterior: return "exterior";
  }
  return "?";
}

namespace {

using Coeffs = std::vector<double>;

void trim(Coeffs& p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
}

void normalize(Coeffs& p) {
  double m = 0.0;
  for (double c : p) m = std::max(m, std::abs(c));
  if (m > 0.0) {
    for (double& c : p) c /= m;
  }
}

// Remainder of a / b, with coefficients below tol times the largest
// magnitude seen during the division flushed to zero.
Coeffs remainder(Coeffs a, const Coeffs& b, double tol) {
  const std::size_t db = b.size() - 1;
  double scale = 0.0;
  for (double c : a) scale = std::max(scale, std::abs(c));
  for (std::size_t i = a.size(); i-- > db;) {
    const double q = a[i] / b[db];
    for (std::size_t j = 0; j <= db; ++j) {
      const double t = q * b[j];
      scale = std::max(scale, std::abs(t));
      a[i - db + j] -= t;
    }
    a[i] = 0.0;
  }
  a.resize(db);
  for (double& c : a) {
    if (std::abs(c) <= tol * scale) c = 0.0;
  }
  trim(a);
  return a;
}

int sign_changes(const std::vector<Coeffs>& seq, bool at_minus_infinity) {
  int changes = 0;
  int prev = 0;
  for (const auto& p : seq) {
    int s = p.back() > 0 ? 1 : -1;
    if (at_minus_infinity && (p.size() - 1) % 2 == 1) s = -s;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

RootClass is_real_rooted(std::span<const double> ascending_coeffs, double tol) {
  Coeffs p(ascending_coeffs.begin(), ascending_coeffs.end());
  double maxc = 0.0;
  for (double c : p) maxc = std::max(maxc, std::abs(c));
  if (p.size() < 2 || maxc == 0.0) throw std::invalid_argument("is_real_rooted: degree must be >= 1");
  if (std::abs(p.back()) < tol * maxc) throw NumericalError("ill-conditioned: leading coefficient below tolerance");
  const std::size_t n = p.size() - 1;
  if (n == 1) return RootClass::all_real;

  normalize(p);
  Coeffs dp(n);
  for (std::size_t k = 1; k <= n; ++k) dp[k - 1] = static_cast<double>(k) * p[k];
  normalize(dp);

  std::vector<Coeffs> seq{p, dp};
  for (;;) {
    const auto& a = seq[seq.size() - 2];
    const auto& b = seq.back();
    if (b.size() == 1) break;  // constant: gcd is trivial
    Coeffs r = remainder(a, b, tol);
    if (r.empty()) break;  // b is the gcd
    for (double& c : r) c = -c;
    normalize(r);
    seq.push_back(std::move(r));
  }
  const std::size_t gcd_degree = seq.back().size() - 1;
  const int distinct_real = sign_changes(seq, true) - sign_changes(seq, false);
  if (distinct_real == static_cast<int>(n - gcd_degree)) {
    return gcd_degree > 0 ? RootClass::boundary : RootClass::all_real;
  }
  return RootClass::not_all_real;
}

RootClass is_real_rooted(const MultiPoly& p, double tol) {
  if (p.num_vars() != 1) throw std::invalid_argument("is_real_rooted: polynomial must be univariate");
  const auto deg = p.degree();
  if (!deg || *deg < 1) throw std::invalid_argument("is_real_rooted: degree must be >= 1");
  Coeffs c(static_cast<std::size_t>(*deg) + 1, 0.0);
  for (std::size_t t = 0; t < p.term_count(); ++t) c[p.exponent(t)[0]] = p.coefficient(t);
  return is_real_rooted(c, tol);
}

namespace {

Coeffs monic_coeffs(std::span<const double> e) {
  const std::size_t n = e.size();
  Coeffs c(n + 1);
  c[n] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) c[n - k] = ((k % 2 == 0) ? 1.0 : -1.0) * e[k - 1];
  return c;
}

bool counts_as_real(RootClass c) { return c != RootClass::not_all_real; }

}  // namespace

BallClassification classify_quotient_point(const QuotientPoint& y, double radius,
                                           std::size_t samples, RngStream& rng,
                                           BallThresholds thresholds) {
  if (samples < 100) throw std::invalid_argument("classify_quotient_point: samples must be >= 100");
  if (!(radius > 0.0)) throw std::invalid_argument("classify_quotient_point: radius must be positive");
  BallClassification out;
  out.samples = samples;
  if (!counts_as_real(is_real_rooted(monic_coeffs(y.e)))) {
    out.verdict = PointVerdict::exterior;
    return out;
  }
  const std::size_t n = y.n();
  std::vector<double> shifted(n), dir(n);
  std::size_t real = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    double norm2 = 0.0;
    for (auto& v : dir) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n)) / std::sqrt(norm2);
    for (std::size_t k = 0; k < n; ++k) shifted[k] = y.e[k] + r * dir[k];
    if (counts_as_real(is_real_rooted(monic_coeffs(shifted)))) ++real;
  }
  out.real_fraction = static_cast<double>(real) / static_cast<double>(samples);
  if (real == samples) {
    out.verdict = PointVerdict::interior;
  } else if (out.real_fraction >= thresholds.low && out.real_fraction <= thresholds.high) {
    out.verdict = PointVerdict::boundary;
  } else if (out.real_fraction > thresholds.high) {
    out.verdict = PointVerdict::interior;
    out.confident = false;
  } else {
    out.verdict = PointVerdict::boundary;
    out.confident = false;
  }
  return out;
}

// --- involutions and volume fractions -------------------------------------------

BigInt count_involutions(int n) {
  if (n < 0 || n > 500) throw std::invalid_argument("count_involutions: n must be in [0, 500]");
  BigInt prev = 1, cur = 1;  // I(0), I(1)
  for (int k = 2; k <= n; ++k) {
    BigInt next = cur + (k - 1) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

BigInt count_involutions_closed_form(int n) {
  if (n < 0 || n > 500) throw std::invalid_argument("count_involutions: n must be in [0, 500]");
  std::vector<BigInt> fact(static_cast<std::size_t>(n) + 1);
  fact[0] = 1;
  for (int k = 1; k <= n; ++k) fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k) - 1] * k;
  BigInt sum = 0;
  for (int k = 0; 2 * k <= n; ++k) {
    BigInt den = BigInt(1) << k;
    den *= fact[static_cast<std::size_t>(k)] * fact[static_cast<std::size_t>(n - 2 * k)];
    sum += fact[static_cast<std::size_t>(n)] / den;
  }
  return sum;
}

std::vector<std::vector<int>> enumerate_involutions(int n) {
  if (n < 0 || n > 8) throw std::invalid_argument("enumerate_involutions: n must be in [0, 8]");
  std::vector<std::vector<int>> out;
  std::vector<int> image(static_cast<std::size_t>(n), -1);
  std::function<void()> recurse = [&] {
    auto it = std::find(image.begin(), image.end(), -1);
    if (it == image.end()) {
      out.push_back(image);
      return;
    }
    const int i = static_cast<int>(it - image.begin());
    image[static_cast<std::size_t>(i)] = i;
    recurse();
    for (int j = i + 1; j < n; ++j) {
      if (image[static_cast<std::size_t>(j)] != -1) continue;
      image[static_cast<std::size_t>(i)] = j;
      image[static_cast<std::size_t>(j)] = i;
      recurse();
      image[static_cast<std::size_t>(j)] = -1;
    }
    image[static_cast<std::size_t>(i)] = -1;
  };
  recurse();
  std::sort(out.begin(), out.end());
  return out;
}

std::string big_to_string(const BigInt& b) { return b.str(); }

namespace {

double big_log10(const BigInt& b) {
  if (b <= 0) return -std::numeric_limits<double>::infinity();
  const std::string s = b.str();
  if (s.size() <= 300) return std::log10(b.convert_to<double>());
  return std::log10(std::stod(s.substr(0, 17))) + static_cast<double>(s.size() - 17);
}

nlohmann::json big_json(const BigInt& b) {
  if (b >= std::numeric_limits<std::int64_t>::min() && b <= std::numeric_limits<std::int64_t>::max()) {
    return b.convert_to<std::int64_t>();
  }
  return b.str();
}

}  // namespace

nlohmann::json rational_json(const Rational& r) {
  return {{"num", big_json(boost::multiprecision::numerator(r))},
          {"den", big_json(boost::multiprecision::denominator(r))}};
}

double RarityReport::approx() const {
  const double lg = log10();
  if (lg > -300.0 && lg < 300.0) return fraction.convert_to<double>();
  return std::pow(10.0, lg);
}

double RarityReport::log10() const {
  return big_log10(boost::multiprecision::numerator(fraction)) -
         big_log10(boost::multiprecision::denominator(fraction));
}

nlohmann::json RarityReport::to_json() const {
  return {{"kind", kind},
          {"inputs", inputs},
          {"fraction", rational_json(fraction)},
          {"approx", approx()},
          {"log10", log10()}};
}

RarityReport real_image_fraction_sn(int n) {
  if (n < 1) throw std::invalid_argument("real_image_fraction: n must be >= 1");
  return {"sn", Rational(BigInt(1), count_involutions(n)), {{"n", n}}};
}

RarityReport real_image_fraction_shape(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("real_image_fraction: n and d must be >= 1");
  BigInt den = (BigInt(1) << std::min(n, d)) * count_involutions(n);
  return {"shape", Rational(BigInt(1), den), {{"n", n}, {"d", d}}};
}

RarityReport real_image_fraction_stratum(std::span<const int> partition) {
  if (partition.empty()) throw std::invalid_argument("invalid partition: empty");
  std::map<int, int> multiplicity;
  int n = 0;
  for (int part : partition) {
    if (part < 1) throw std::invalid_argument("invalid partition: parts must be positive");
    ++multiplicity[part];
    n += part;
  }
  BigInt inv = 1;
  for (const auto& [size, m] : multiplicity) inv *= count_involutions(m);
  std::vector<int> sorted(partition.begin(), partition.end());
  std::sort(sorted.rbegin(), sorted.rend());
  return {"stratum", Rational(BigInt(1), inv), {{"n", n}, {"partition", sorted}}};
}

// --- Monte-Carlo estimators --------------------------------------------------------

std::string to_string(UnivariateEnsemble e) {
  return e == UnivariateEnsemble::kac ? "kac" : "monic_gaussian";
}

UnivariateEnsemble univariate_ensemble_from_string(const std::string& s) {
  if (s == "kac") return UnivariateEnsemble::kac;
  if (s == "monic_gaussian" || s == "monic") return UnivariateEnsemble::monic_gaussian;
  throw ConfigError("unknown ensemble '" + s + "' (expected kac or monic_gaussian)");
}

namespace {

constexpr std::size_t kTrialBlock = 1024;

struct BlockTally {
  std::size_t hits = 0;
  std::size_t resampled = 0;
};

template <class TrialFn>
ProbabilityEstimate run_blocks(std::size_t trials, const RngStream& rng, unsigned jobs, TrialFn trial) {
  const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<BlockTally> tallies(blocks);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    RngStream stream = rng.split(b);
    const std::size_t count = std::min(kTrialBlock, trials - b * kTrialBlock);
    for (std::size_t i = 0; i < count; ++i) trial(stream, tallies[b]);
  });
  ProbabilityEstimate est;
  est.trials = trials;
  std::size_t hits = 0;
  for (const auto& t : tallies) {
    hits += t.hits;
    est.resampled += t.resampled;
  }
  est.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(trials));
  return est;
}

Coeffs ascending(const MultiPoly& p, int degree) {
  Coeffs c(static_cast<std::size_t>(degree) + 1, 0.0);
  for (std::size_t t = 0; t < p.term_count(); ++t) c[p.exponent(t)[0]] = p.coefficient(t);
  return c;
}

}  // namespace

ProbabilityEstimate estimate_real_root_probability(UnivariateEnsemble ensemble, int degree,
                                                   std::size_t trials, const RngStream& rng,
                                                   unsigned jobs) {
  if (degree < 1) throw std::invalid_argument("estimate_real_root_probability: degree must be >= 1");
  if (trials < 1000) throw std::invalid_argument("estimate_real_root_probability: trials must be >= 1000");
  return run_blocks(trials, rng, jobs, [&](RngStream& stream, BlockTally& tally) {
    for (;;) {
      const auto c = ascending(sample_univariate(ensemble, degree, stream), degree);
      try {
        if (counts_as_real(is_real_rooted(c))) ++tally.hits;
        return;
      } catch (const NumericalError&) {
        ++tally.resampled;
      }
    }
  });
}

AsymmetricBound expected_asymmetric_bound(int n, double p_hat) {
  if (n < 1) throw std::invalid_argument("expected_asymmetric_bound: n must be >= 1");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::invalid_argument("expected_asymmetric_bound: p_hat must lie in [0, 1]");
  AsymmetricBound out;
  if (p_hat == 0.0) {
    out.log10 = -std::numeric_limits<double>::infinity();
    out.value = 0.0;
    return out;
  }
  out.log10 = n * std::log10(static_cast<double>(n)) + std::log10(p_hat);
  out.value = std::pow(10.0, out.log10);
  if (n <= 15) out.value = std::pow(static_cast<double>(n), n) * p_hat;
  return out;
}

namespace {

double horner(const Coeffs& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

Coeffs differentiate(const Coeffs& c) {
  Coeffs d(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

// Root of g on [lo, hi] given g(lo) < 0 < g(hi), safeguarded Newton.
double bracketed_root(const Coeffs& g, const Coeffs& dg, double lo, double hi, double t) {
  for (int it = 0; it < 100; ++it) {
    const double v = horner(g, t);
    if (v == 0.0) return t;
    if (v < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double slope = horner(dg, t);
    double next = slope != 0.0 ? t - v / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

constexpr std::size_t kIntervalGrid = 2001;

}  // namespace

double minimize_on_interval(std::span<const double> ascending_coeffs, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("minimize_on_interval: a must be positive");
  const Coeffs c(ascending_coeffs.begin(), ascending_coeffs.end());
  const Coeffs dc = differentiate(c);
  const Coeffs ddc = differentiate(dc);
  std::vector<double> grid(kIntervalGrid), values(kIntervalGrid);
  for (std::size_t i = 0; i < kIntervalGrid; ++i) {
    grid[i] = -a + 2.0 * a * static_cast<double>(i) / static_cast<double>(kIntervalGrid - 1);
    values[i] = horner(c, grid[i]);
  }
  grid.back() = a;
  double best_t = -a;
  double best_v = horner(c, -a);
  if (const double v = horner(c, a); v < best_v) {
    best_v = v;
    best_t = a;
  }
  for (std::size_t i = 1; i + 1 < kIntervalGrid; ++i) {
    if (!(values[i] <= values[i - 1] && values[i] <= values[i + 1])) continue;
    double t = grid[i];
    const double lo = grid[i - 1], hi = grid[i + 1];
    if (horner(dc, lo) < 0.0 && horner(dc, hi) > 0.0) t = bracketed_root(dc, ddc, lo, hi, t);
    const double v = horner(c, t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return best_t;
}

ProbabilityEstimate kac_endpoint_minimum_probability(int degree, double a, std::size_t trials,
                                                     const RngStream& rng, unsigned jobs) {
  if (degree < 1) throw std::invalid_argument("kac_endpoint_minimum_probability: degree must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("kac_endpoint_minimum_probability: a must be positive");
  if (trials < 1000) throw std::invalid_argument("kac_endpoint_minimum_probability: trials must be >= 1000");
  return run_blocks(trials, rng, jobs, [&](RngStream& stream, BlockTally& tally) {
    const auto c = ascending(sample_univariate(UnivariateEnsemble::kac, degree, stream), degree);
    const double t = minimize_on_interval(c, a);
    if (std::abs(t - a) <= 1e-9 || std::abs(t + a) <= 1e-9) ++tally.hits;
  });
}

// --- twisted sectors ------------------------------------------------------------------

SectorReport sector_volume_check(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("sector_volume_check: n must be in [1, 8]");
  using Eigen::Index;
  const Index N = n;
  SectorReport report;
  report.n = n;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (const auto& sigma : enumerate_involutions(n)) {
    SectorVolume sv;
    sv.involution = sigma;

    // Real-linear map v -> sigma(conj(v)) on C^n viewed as R^{2n}, layout
    // (Re v, Im v). Its +1 eigenspace is the twisted real sector.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    for (Index k = 0; k < N; ++k) {
      const Index src = sigma[static_cast<std::size_t>(k)];
      M(k, src) = 1.0;
      M(N + k, N + src) = -1.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M - Eigen::MatrixXd::Identity(2 * N, 2 * N));
    sv.fixed_dimension = static_cast<int>(2 * N - lu.rank());

    // Unitary transport of the real sector onto the twisted one.
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
    for (Index i = 0; i < N; ++i) {
      const Index j = sigma[static_cast<std::size_t>(i)];
      if (j == i) {
        T(i, i) = 1.0;
      } else if (i < j) {
        T(i, i) = inv_sqrt2;
        T(j, i) = inv_sqrt2;
        T(i, j) = Complex(0.0, inv_sqrt2);
        T(j, j) = Complex(0.0, -inv_sqrt2);
      }
    }
    sv.unitarity_residual = (T.adjoint() * T - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff();

    Eigen::MatrixXd basis(2 * N, N);
    basis.topRows(N) = T.real();
    basis.bottomRows(N) = T.imag();
    sv.transport_residual = (M * basis - basis).cwiseAbs().maxCoeff();
    // Gram matrix of the real inner product Re<u, v> induced by the metric.
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    sv.gram_det = gram.determinant();
    sv.volume_scale = std::sqrt(sv.gram_det);
    report.sectors.push_back(std::move(sv));
  }
  double total = 0.0, identity = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& sv : report.sectors) {
    total += sv.volume_scale;
    lo = std::min(lo, sv.volume_scale);
    hi = std::max(hi, sv.volume_scale);
    bool is_identity = true;
    for (int k = 0; k < n; ++k) is_identity = is_identity && sv.involution[static_cast<std::size_t>(k)] == k;
    if (is_identity) identity = sv.volume_scale;
  }
  report.identity_fraction = identity / total;
  if (hi - lo <= 1e-10 * hi) {
    report.identity_fraction_exact = Rational(BigInt(1), BigInt(report.sectors.size()));
  }
  return report;
}

// --- counting heuristic -----------------------------------------------------------------

double capacity_ratio(int n, int k, int d) {
  if (d < 2) throw std::invalid_argument("capacity_ratio: d must be >= 2");
  if (n < 1 || k < 1) throw std::invalid_argument("capacity_ratio: n and k must be >= 1");
  return static_cast<double>(n) * (n - 1) / (2.0 * std::pow(static_cast<double>(d - 1), k / 2.0));
}

std::optional<Rational> capacity_ratio_exact(int n, int k, int d) {
  if (d < 2) throw std::invalid_argument("capacity_ratio: d must be >= 2");
  if (n < 1 || k < 1) throw std::invalid_argument("capacity_ratio: n and k must be >= 1");
  BigInt base = d - 1;
  BigInt den = 2;
  if (k % 2 == 0) {
    den *= boost::multiprecision::pow(base, static_cast<unsigned>(k / 2));
  } else {
    const auto root = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(d - 1))));
    if (root * root != d - 1) return std::nullopt;
    den *= boost::multiprecision::pow(BigInt(root), static_cast<unsigned>(k));
  }
  return Rational(BigInt(n) * (n - 1), den);
}

long long capacity_crossover_degree(int n) {
  const long long m = n;
  return 1 + m * m * (m - 1) * (m - 1);
}

}  // namespace symquot
