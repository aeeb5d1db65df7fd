#include "symquot/polynomial.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "symquot/error.hpp"

namespace symquot {

namespace {

bool lex_less(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_arity(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw std::invalid_argument("arity: polynomial has " + std::to_string(expected) +
                                " variables, point has " + std::to_string(got));
  }
}

}  // namespace

// --- TermBuilder -------------------------------------------------------------

void TermBuilder::add(std::span<const std::uint16_t> alpha, double c) {
  if (alpha.size() != num_vars_) throw std::invalid_argument("arity: exponent length mismatch");
  if (c == 0.0) return;
  exps_.insert(exps_.end(), alpha.begin(), alpha.end());
  coeffs_.push_back(c);
}

MultiPoly TermBuilder::build() {
  const std::size_t m = num_vars_;
  const std::size_t count = coeffs_.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    return std::span<const std::uint16_t>(exps_.data() + i * m, m);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(key(a), key(b)); });

  MultiPoly out(m);
  out.exps_.reserve(exps_.size());
  out.coeffs_.reserve(count);
  std::size_t i = 0;
  while (i < count) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < count && std::ranges::equal(key(order[i]), key(order[j]))) {
      sum += coeffs_[order[j]];
      ++j;
    }
    if (sum != 0.0) {
      auto k = key(order[i]);
      out.exps_.insert(out.exps_.end(), k.begin(), k.end());
      out.coeffs_.push_back(sum);
    }
    i = j;
  }
  exps_.clear();
  coeffs_.clear();
  return out;
}

// --- MultiPoly -----------------------------------------------------------------

MultiPoly::MultiPoly(std::size_t num_vars) : num_vars_(num_vars) {}

MultiPoly MultiPoly::constant(std::size_t num_vars, double c) {
  MultiPoly p(num_vars);
  if (c != 0.0) {
    p.exps_.assign(num_vars, 0);
    p.coeffs_.push_back(c);
  }
  return p;
}

MultiPoly MultiPoly::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) throw std::out_of_range("variable index out of range");
  Exponent alpha(num_vars, 0);
  alpha[index] = 1;
  return monomial(std::move(alpha), 1.0);
}

MultiPoly MultiPoly::monomial(Exponent alpha, double c) {
  MultiPoly p(alpha.size());
  if (c != 0.0) {
    p.exps_ = std::move(alpha);
    p.coeffs_.push_back(c);
  }
  return p;
}

MultiPoly MultiPoly::from_terms(std::size_t num_vars,
                                std::vector<std::pair<Exponent, double>> terms) {
  TermBuilder b(num_vars);
  for (const auto& [alpha, c] : terms) b.add(alpha, c);
  return b.build();
}

std::optional<int> MultiPoly::degree() const {
  if (is_zero()) return std::nullopt;
  int best = 0;
  for (std::size_t t = 0; t < term_count(); ++t) {
    int d = 0;
    for (auto a : exponent(t)) d += a;
    best = std::max(best, d);
  }
  return best;
}

std::vector<int> MultiPoly::max_exponents() const {
  std::vector<int> out(num_vars_, 0);
  for (std::size_t t = 0; t < term_count(); ++t) {
    auto e = exponent(t);
    for (std::size_t i = 0; i < num_vars_; ++i) out[i] = std::max<int>(out[i], e[i]);
  }
  return out;
}

double MultiPoly::coefficient_of(std::span<const std::uint16_t> alpha) const {
  check_arity(num_vars_, alpha.size());
  std::size_t lo = 0, hi = term_count();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (lex_less(exponent(mid), alpha)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < term_count() && std::ranges::equal(exponent(lo), alpha)) return coeffs_[lo];
  return 0.0;
}

template <class T>
T MultiPoly::eval_impl(std::span<const T> x) const {
  check_arity(num_vars_, x.size());
  const auto maxe = max_exponents();
  std::vector<std::vector<T>> powers(num_vars_);
  for (std::size_t i = 0; i < num_vars_; ++i) {
    powers[i].resize(static_cast<std::size_t>(maxe[i]) + 1);
    powers[i][0] = T(1);
    for (int k = 1; k <= maxe[i]; ++k) powers[i][k] = powers[i][k - 1] * x[i];
  }
  T sum(0);
  for (std::size_t t = 0; t < term_count(); ++t) {
    T term(coeffs_[t]);
    auto e = exponent(t);
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (e[i] != 0) term *= powers[i][e[i]];
    }
    sum += term;
  }
  return sum;
}

double MultiPoly::eval(std::span<const double> x) const { return eval_impl(x); }
Complex MultiPoly::eval(std::span<const Complex> x) const { return eval_impl(x); }

MultiPoly MultiPoly::derivative(std::size_t var) const {
  if (var >= num_vars_) throw std::out_of_range("derivative variable out of range");
  // Lowering one exponent preserves the lexicographic order of the
  // surviving terms, so no resort is needed.
  MultiPoly out(num_vars_);
  for (std::size_t t = 0; t < term_count(); ++t) {
    auto e = exponent(t);
    if (e[var] == 0) continue;
    std::size_t start = out.exps_.size();
    out.exps_.insert(out.exps_.end(), e.begin(), e.end());
    out.exps_[start + var] -= 1;
    out.coeffs_.push_back(coeffs_[t] * e[var]);
  }
  return out;
}

MultiPoly MultiPoly::pow(unsigned k) const {
  MultiPoly result = constant(num_vars_, 1.0);
  MultiPoly base = *this;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

MultiPoly MultiPoly::permute_variables(std::span<const std::size_t> perm) const {
  check_arity(num_vars_, perm.size());
  TermBuilder b(num_vars_);
  Exponent alpha(num_vars_);
  for (std::size_t t = 0; t < term_count(); ++t) {
    auto e = exponent(t);
    for (std::size_t i = 0; i < num_vars_; ++i) alpha[perm[i]] = e[i];
    b.add(alpha, coeffs_[t]);
  }
  return b.build();
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  check_arity(a.num_vars_, b.num_vars_);
  MultiPoly out(a.num_vars_);
  std::size_t i = 0, j = 0;
  auto push = [&](std::span<const std::uint16_t> e, double c) {
    if (c == 0.0) return;
    out.exps_.insert(out.exps_.end(), e.begin(), e.end());
    out.coeffs_.push_back(c);
  };
  while (i < a.term_count() || j < b.term_count()) {
    if (j == b.term_count() || (i < a.term_count() && lex_less(a.exponent(i), b.exponent(j)))) {
      push(a.exponent(i), a.coeffs_[i]);
      ++i;
    } else if (i == a.term_count() || lex_less(b.exponent(j), a.exponent(i))) {
      push(b.exponent(j), b.coeffs_[j]);
      ++j;
    } else {
      push(a.exponent(i), a.coeffs_[i] + b.coeffs_[j]);
      ++i;
      ++j;
    }
  }
  return out;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  check_arity(a.num_vars_, b.num_vars_);
  const std::size_t m = a.num_vars_;
  TermBuilder builder(m);
  Exponent alpha(m);
  for (std::size_t i = 0; i < a.term_count(); ++i) {
    auto ea = a.exponent(i);
    for (std::size_t j = 0; j < b.term_count(); ++j) {
      auto eb = b.exponent(j);
      for (std::size_t k = 0; k < m; ++k) alpha[k] = static_cast<std::uint16_t>(ea[k] + eb[k]);
      builder.add(alpha, a.coeffs_[i] * b.coeffs_[j]);
    }
  }
  return builder.build();
}

MultiPoly operator*(double s, const MultiPoly& p) {
  if (s == 0.0) return MultiPoly(p.num_vars_);
  MultiPoly out = p;
  for (auto& c : out.coeffs_) c *= s;
  return out;
}

// --- free functions ------------------------------------------------------------

Derivatives derivatives(const MultiPoly& p) {
  if (p.num_vars() == 0) throw std::invalid_argument("derivatives: polynomial has no variables");
  const std::size_t m = p.num_vars();
  Derivatives d;
  d.grad.reserve(m);
  for (std::size_t i = 0; i < m; ++i) d.grad.push_back(p.derivative(i));
  d.hess.assign(m, std::vector<MultiPoly>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      d.hess[i][j] = d.grad[i].derivative(j);
      if (j != i) d.hess[j][i] = d.hess[i][j];
    }
  }
  return d;
}

MultiPoly compose(const MultiPoly& outer, std::span<const MultiPoly> subs, std::size_t term_cap) {
  if (subs.size() != outer.num_vars()) {
    throw std::invalid_argument("arity: compose needs " + std::to_string(outer.num_vars()) +
                                " substitutions, got " + std::to_string(subs.size()));
  }
  if (subs.empty()) return outer;
  const std::size_t m = subs.front().num_vars();
  for (const auto& s : subs) {
    if (s.num_vars() != m) throw std::invalid_argument("arity: substitutions disagree on num_vars");
  }
  auto guard = [&](const MultiPoly& q) {
    if (q.term_count() > term_cap) {
      throw NumericalError("compose: expansion exceeds term cap (" + std::to_string(q.term_count()) +
                           " > " + std::to_string(term_cap) + ")");
    }
  };

  // Memoized powers of each substitution, then Horner-free term expansion.
  const auto maxe = outer.max_exponents();
  std::vector<std::vector<MultiPoly>> powers(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    powers[i].push_back(MultiPoly::constant(m, 1.0));
    for (int k = 1; k <= maxe[i]; ++k) {
      powers[i].push_back(powers[i].back() * subs[i]);
      guard(powers[i].back());
    }
  }
  MultiPoly sum(m);
  for (std::size_t t = 0; t < outer.term_count(); ++t) {
    auto e = outer.exponent(t);
    MultiPoly term = MultiPoly::constant(m, outer.coefficient(t));
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (e[i] != 0) {
        term = term * powers[i][e[i]];
        guard(term);
      }
    }
    sum = sum + term;
    guard(sum);
  }
  return sum;
}

MultiPoly norm_power(std::size_t num_vars, unsigned k) {
  MultiPoly sq(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) {
    auto v = MultiPoly::variable(num_vars, i);
    sq = sq + v * v;
  }
  return sq.pow(k);
}

nlohmann::json to_json(const MultiPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto e = p.exponent(t);
    terms.push_back({{"alpha", std::vector<int>(e.begin(), e.end())}, {"c", p.coefficient(t)}});
  }
  return {{"num_vars", p.num_vars()}, {"terms", std::move(terms)}};
}

MultiPoly poly_from_json(const nlohmann::json& j) {
  const auto m = j.at("num_vars").get<std::size_t>();
  TermBuilder b(m);
  for (const auto& term : j.at("terms")) {
    auto alpha_int = term.at("alpha").get<std::vector<int>>();
    Exponent alpha;
    for (int a : alpha_int) {
      if (a < 0 || a > 65535) throw std::invalid_argument("exponent out of range");
      alpha.push_back(static_cast<std::uint16_t>(a));
    }
    b.add(alpha, term.at("c").get<double>());
  }
  return b.build();
}

// --- PolyEvaluator ---------------------------------------------------------------

PolyEvaluator::PolyEvaluator(const MultiPoly& p) : num_vars_(p.num_vars()) {
  max_exp_ = p.max_exponents();
  if (p.is_zero() || num_vars_ == 0) {
    for (std::size_t t = 0; t < p.term_count(); ++t) coeffs_.push_back(p.coefficient(t));
    return;
  }
  if (p.term_count() >= std::numeric_limits<std::uint32_t>::max()) throw std::length_error("PolyEvaluator: too many terms");
  levels_.resize(num_vars_);
  build(p, 0, 0, p.term_count());
  for (auto& L : levels_) L.offsets.push_back(static_cast<std::uint32_t>(L.edges.size()));
}

// Terms are sorted lexicographically, so the terms sharing exponents of
// x_1..x_level form contiguous ranges. Nodes of one level are numbered in
// the order they are created, which is also the order of their parents' edges.
void PolyEvaluator::build(const MultiPoly& p, std::size_t level, std::size_t lo, std::size_t hi) {
  Level& L = levels_[level];
  L.offsets.push_back(static_cast<std::uint32_t>(L.edges.size()));
  std::vector<Edge> local;
  std::size_t start = lo;
  while (start < hi) {
    const std::uint16_t e = p.exponent(start)[level];
    std::size_t stop = start + 1;
    while (stop < hi && p.exponent(stop)[level] == e) ++stop;
    if (level + 1 == num_vars_) {
      local.push_back({static_cast<std::uint32_t>(coeffs_.size()), e});
      coeffs_.push_back(p.coefficient(start));
    } else {
      local.push_back({static_cast<std::uint32_t>(levels_[level + 1].offsets.size()), e});
      build(p, level + 1, start, stop);
    }
    start = stop;
  }
  // Children never add edges to this level, so the range stays contiguous.
  levels_[level].edges.insert(levels_[level].edges.end(), local.begin(), local.end());
}

double PolyEvaluator::value(std::span<const double> x) const {
  return jet(x, 0).value;
}

// Levels are processed from the last variable up. A node at level k carries
// a jet in x_k..x_{m-1} laid out as [value | gradient | row-major Hessian].
Jet PolyEvaluator::jet(std::span<const double> x, int order) const {
  check_arity(num_vars_, x.size());
  const std::size_t m = num_vars_;
  Jet out;
  out.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  if (order >= 2) out.hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  if (levels_.empty()) {
    for (double c : coeffs_) out.value += c;
    return out;
  }
  auto stride = [order](std::size_t nv) { return 1 + (order >= 1 ? nv : 0) + (order >= 2 ? nv * nv : 0); };
  thread_local std::vector<double> buf_a, buf_b, pw, dpw, d2pw;
  std::vector<double>* cur = &buf_a;
  std::vector<double>* below = &buf_b;
  for (std::size_t k = m; k-- > 0;) {
    const Level& L = levels_[k];
    const std::size_t nk = m - k, nc = nk - 1;
    const std::size_t sk = stride(nk), sc = stride(nc);
    const std::size_t nodes = L.offsets.size() - 1;
    cur->assign(nodes * sk, 0.0);
    const int me = max_exp_[k];
    pw.assign(static_cast<std::size_t>(me) + 1, 1.0);
    dpw.assign(pw.size(), 0.0);
    d2pw.assign(pw.size(), 0.0);
    for (int e = 1; e <= me; ++e) pw[static_cast<std::size_t>(e)] = pw[static_cast<std::size_t>(e) - 1] * x[k];
    for (int e = 1; e <= me; ++e) dpw[static_cast<std::size_t>(e)] = e * pw[static_cast<std::size_t>(e) - 1];
    for (int e = 2; e <= me; ++e) d2pw[static_cast<std::size_t>(e)] = e * (e - 1) * pw[static_cast<std::size_t>(e) - 2];
    const double* child_data = k + 1 == m ? coeffs_.data() : below->data();
    for (std::size_t node = 0; node < nodes; ++node) {
      double* J = cur->data() + node * sk;
      double* g = J + 1;
      double* H = g + nk;
      for (std::uint32_t ei = L.offsets[node]; ei < L.offsets[node + 1]; ++ei) {
        const Edge edge = L.edges[ei];
        const double* C = child_data + static_cast<std::size_t>(edge.child) * sc;
        const double p = pw[edge.exp], cv = C[0];
        J[0] += p * cv;
        if (order < 1) continue;
        const double p1 = dpw[edge.exp];
        const double* cg = C + 1;
        g[0] += p1 * cv;
        for (std::size_t j = 0; j < nc; ++j) g[1 + j] += p * cg[j];
        if (order < 2) continue;
        const double* cH = cg + nc;
        H[0] += d2pw[edge.exp] * cv;
        if (p1 != 0.0) {
          for (std::size_t j = 0; j < nc; ++j) H[1 + j] += p1 * cg[j];
        }
        for (std::size_t i = 0; i < nc; ++i) {
          double* row = H + (1 + i) * nk + 1;
          const double* crow = cH + i * nc;
          for (std::size_t j = 0; j < nc; ++j) row[j] += p * crow[j];
        }
      }
      if (order >= 2) {
        for (std::size_t j = 1; j < nk; ++j) H[j * nk] = H[j];
      }
    }
    std::swap(cur, below);
  }
  const double* root = below->data();
  out.value = root[0];
  if (order >= 1) out.grad = Eigen::Map<const Eigen::VectorXd>(root + 1, static_cast<Eigen::Index>(m));
  if (order >= 2) {
    out.hess = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        root + 1 + m, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  }
  return out;
}

}  // namespace symquot
