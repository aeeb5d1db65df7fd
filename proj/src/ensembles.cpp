#include "symquot/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>

#include "symquot/error.hpp"

namespace symquot {

// --- samplers -----------------------------------------------------------------

MultiPoly sample_nhkss(std::size_t m, int d, RngStream& rng, bool homogeneous) {
  if (m < 1) throw std::invalid_argument("sample_nhkss: m must be >= 1");
  if (d < 0) throw std::invalid_argument("sample_nhkss: d must be >= 0");
  if (d > 65535) throw std::invalid_argument("sample_nhkss: degree too large");
  const double log_dfact = std::lgamma(d + 1.0);
  const double log_max = std::log(std::numeric_limits<double>::max());
  TermBuilder b(m);
  Exponent alpha(m, 0);
  std::function<void(std::size_t, int, double)> visit = [&](std::size_t i, int used, double log_denom) {
    if (i == m) {
      if (homogeneous && used != d) return;
      const double log_w = log_dfact - log_denom - std::lgamma(d - used + 1.0);
      if (log_w > log_max) throw NumericalError("sample_nhkss: multinomial coefficient overflows double");
      b.add(alpha, rng.normal() * std::exp(0.5 * log_w));
      return;
    }
    for (int a = 0; a + used <= d; ++a) {
      alpha[i] = static_cast<std::uint16_t>(a);
      visit(i + 1, used + a, log_denom + std::lgamma(a + 1.0));
    }
    alpha[i] = 0;
  };
  visit(0, 0, 0.0);
  return b.build();
}

MultiPoly sample_univariate(UnivariateEnsemble ensemble, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_univariate: degree must be >= 1");
  TermBuilder b(1);
  const int random_count = ensemble == UnivariateEnsemble::kac ? n + 1 : n;
  for (int k = 0; k < random_count; ++k) {
    b.add(std::vector<std::uint16_t>{static_cast<std::uint16_t>(k)}, rng.normal());
  }
  if (ensemble == UnivariateEnsemble::monic_gaussian) {
    b.add(std::vector<std::uint16_t>{static_cast<std::uint16_t>(n)}, 1.0);
  }
  return b.build();
}

// --- Reynolds operator -----------------------------------------------------------

namespace {

void check_factorial_budget(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  if (f > kFactorialBudget) {
    throw std::invalid_argument("factorial budget: " + std::to_string(n) + "! exceeds " +
                                std::to_string(static_cast<long long>(kFactorialBudget)));
  }
}

}  // namespace

MultiPoly reynolds_symmetrize_blocks(const MultiPoly& q, std::size_t block) {
  if (block == 0 || q.num_vars() % block != 0) {
    throw std::invalid_argument("reynolds: num_vars must be a multiple of the block size");
  }
  const std::size_t n = q.num_vars() / block;
  check_factorial_budget(n);
  using Block = std::vector<std::uint16_t>;
  const std::size_t m = q.num_vars();
  const std::size_t terms = q.term_count();

  // Canonical key per term: its blocks sorted ascending, stored flat.
  std::vector<std::uint16_t> keys(terms * m);
  std::vector<std::size_t> perm(n);
  for (std::size_t t = 0; t < terms; ++t) {
    const auto alpha = q.exponent(t);
    auto blk = [&](std::size_t p) { return alpha.subspan(p * block, block); };
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return std::ranges::lexicographical_compare(blk(a), blk(b));
    });
    for (std::size_t p = 0; p < n; ++p) std::ranges::copy(blk(perm[p]), keys.begin() + static_cast<std::ptrdiff_t>(t * m + p * block));
  }
  auto key = [&](std::size_t t) { return std::span<const std::uint16_t>(keys.data() + t * m, m); };
  std::vector<std::size_t> order(terms);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::ranges::lexicographical_compare(key(a), key(b));
  });

  // Sum coefficients per orbit in term order.
  std::vector<std::pair<std::vector<Block>, double>> orbit_sum;
  for (std::size_t i = 0; i < terms;) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < terms && std::ranges::equal(key(order[i]), key(order[j]))) sum += q.coefficient(order[j++]);
    std::vector<Block> canon(n);
    const auto k = key(order[i]);
    for (std::size_t p = 0; p < n; ++p) canon[p].assign(k.begin() + static_cast<std::ptrdiff_t>(p * block),
                                                         k.begin() + static_cast<std::ptrdiff_t>((p + 1) * block));
    orbit_sum.emplace_back(std::move(canon), sum);
    i = j;
  }

  // Every orbit member receives the orbit mean.
  TermBuilder b(m);
  Exponent alpha(m);
  for (auto& [canon, sum] : orbit_sum) {
    if (sum == 0.0) continue;
    std::vector<Block> arrangement = canon;
    std::size_t orbit = 0;
    do {
      ++orbit;
    } while (std::next_permutation(arrangement.begin(), arrangement.end()));
    const double c = sum / static_cast<double>(orbit);
    do {
      for (std::size_t p = 0; p < n; ++p) {
        std::copy(arrangement[p].begin(), arrangement[p].end(), alpha.begin() + static_cast<std::ptrdiff_t>(p * block));
      }
      b.add(alpha, c);
    } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  }
  return b.build();
}

MultiPoly reynolds_symmetrize(const MultiPoly& q) {
  if (q.num_vars() == 0) return q;
  return reynolds_symmetrize_blocks(q, 1);
}

// --- recipes ------------------------------------------------------------------------

std::string to_string(Construction c) {
  switch (c) {
    case Construction::reynolds: return "reynolds";
    case Construction::quotient: return "quotient";
    case Construction::explicit_poly: return "explicit";
  }
  return "?";
}

std::string to_string(CoerciveSpace s) { return s == CoerciveSpace::config ? "config" : "quotient"; }

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::none: return "none";
    case ConstraintKind::x_sphere: return "x_sphere";
    case ConstraintKind::es_sphere: return "es_sphere";
  }
  return "?";
}

ConstraintKind constraint_from_string(const std::string& s) {
  if (s == "none") return ConstraintKind::none;
  if (s == "x_sphere") return ConstraintKind::x_sphere;
  if (s == "es_sphere") return ConstraintKind::es_sphere;
  throw ConfigError("recipe field 'constraint': unknown value '" + s + "'");
}

int auto_coercive_exponent(int d) { return d % 2 == 0 ? d + 2 : d + 1; }

nlohmann::json LandscapeRecipe::to_json() const {
  nlohmann::json j;
  j["construction"] = to_string(construction);
  j["n"] = n;
  j["degree"] = degree;
  if (coercive) {
    nlohmann::json c;
    c["space"] = to_string(coercive->space);
    c["c"] = coercive->c;
    if (coercive->exponent) {
      c["exponent"] = *coercive->exponent;
    } else {
      c["exponent"] = "auto";
    }
    j["coercive"] = c;
  } else {
    j["coercive"] = nullptr;
  }
  j["constraint"] = to_string(constraint);
  j["seed"] = seed;
  j["count"] = count;
  j["homogeneous"] = homogeneous;
  j["particle_dim"] = particle_dim;
  if (explicit_base) {
    j["base"] = symquot::to_json(*explicit_base);
    j["base_space"] = explicit_in_quotient ? "quotient" : "config";
  }
  return j;
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* name, T fallback) {
  if (!j.contains(name) || j.at(name).is_null()) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("recipe field '") + name + "': " + e.what());
  }
}

}  // namespace

LandscapeRecipe LandscapeRecipe::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("recipe: expected a JSON object");
  LandscapeRecipe r;
  const auto construction = field<std::string>(j, "construction", "reynolds");
  if (construction == "reynolds") {
    r.construction = Construction::reynolds;
  } else if (construction == "quotient") {
    r.construction = Construction::quotient;
  } else if (construction == "explicit") {
    r.construction = Construction::explicit_poly;
  } else {
    throw ConfigError("recipe field 'construction': unknown value '" + construction + "'");
  }
  r.n = field<int>(j, "n", r.n);
  r.degree = field<int>(j, "degree", r.degree);
  r.seed = field<std::uint64_t>(j, "seed", r.seed);
  r.count = field<int>(j, "count", r.count);
  r.homogeneous = field<bool>(j, "homogeneous", r.homogeneous);
  r.particle_dim = field<int>(j, "particle_dim", r.particle_dim);
  r.constraint = constraint_from_string(field<std::string>(j, "constraint", "none"));
  const bool has_coercive = j.contains("coercive") && !j.at("coercive").is_null() &&
                            !(j.at("coercive").is_string() && j.at("coercive").get<std::string>() == "none");
  if (has_coercive) {
    const auto& c = j.at("coercive");
    CoerciveSpec spec;
    if (c.is_string()) {
      if (c.get<std::string>() != "auto") throw ConfigError("recipe field 'coercive': expected object, \"auto\" or \"none\"");
    } else if (c.is_object()) {
      const auto space = field<std::string>(c, "space", "config");
      if (space == "config") {
        spec.space = CoerciveSpace::config;
      } else if (space == "quotient") {
        spec.space = CoerciveSpace::quotient;
      } else {
        throw ConfigError("recipe field 'coercive.space': unknown value '" + space + "'");
      }
      spec.c = field<double>(c, "c", 1.0);
      if (c.contains("exponent") && !c.at("exponent").is_null()) {
        const auto& e = c.at("exponent");
        if (e.is_string()) {
          if (e.get<std::string>() != "auto") throw ConfigError("recipe field 'coercive.exponent': expected integer or \"auto\"");
        } else if (e.is_number_integer()) {
          spec.exponent = e.get<int>();
        } else {
          throw ConfigError("recipe field 'coercive.exponent': expected integer or \"auto\"");
        }
      }
    } else {
      throw ConfigError("recipe field 'coercive': expected object, \"auto\" or \"none\"");
    }
    r.coercive = spec;
  }
  if (j.contains("base") && !j.at("base").is_null()) {
    try {
      r.explicit_base = poly_from_json(j.at("base"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("recipe field 'base': ") + e.what());
    }
    r.explicit_in_quotient = field<std::string>(j, "base_space", "config") == "quotient";
  }
  r.validate();
  return r;
}

void LandscapeRecipe::validate() const {
  if (n < 1) throw ConfigError("recipe field 'n': must be >= 1");
  if (degree < 0) throw ConfigError("recipe field 'degree': must be >= 0");
  if (count < 1) throw ConfigError("recipe field 'count': must be >= 1");
  if (particle_dim < 1) throw ConfigError("recipe field 'particle_dim': must be >= 1");
  if (construction == Construction::quotient && particle_dim != 1) {
    throw ConfigError("recipe field 'particle_dim': quotient construction requires particle_dim = 1");
  }
  if (construction == Construction::explicit_poly) {
    if (!explicit_base) throw ConfigError("recipe field 'base': explicit construction requires a base polynomial");
    const auto expect = static_cast<std::size_t>(explicit_in_quotient ? n : n * particle_dim);
    if (explicit_base->num_vars() != expect) {
      throw ConfigError("recipe field 'base': expected " + std::to_string(expect) + " variables");
    }
  }
  if (coercive) {
    if (!(coercive->c > 0.0)) throw ConfigError("recipe field 'coercive.c': must be positive");
    if (coercive->exponent && (*coercive->exponent < 2 || *coercive->exponent % 2 != 0)) {
      throw ConfigError("recipe field 'coercive.exponent': must be an even integer >= 2");
    }
    const bool quotient_side = construction == Construction::quotient ||
                               (construction == Construction::explicit_poly && explicit_in_quotient);
    if (coercive->space == CoerciveSpace::quotient && !quotient_side) {
      throw ConfigError("recipe field 'coercive.space': quotient coercive requires a quotient construction");
    }
  }
  if (constraint == ConstraintKind::es_sphere && particle_dim != 1) {
    throw ConfigError("recipe field 'constraint': es_sphere requires particle_dim = 1");
  }
}

// --- landscapes ------------------------------------------------------------------------

namespace {

// Largest sum_k k * alpha_k over the terms of a polynomial in (e_1, ..., e_n).
int weighted_degree(const MultiPoly& p) {
  int best = 0;
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto e = p.exponent(t);
    int w = 0;
    for (std::size_t k = 0; k < e.size(); ++k) w += static_cast<int>(k + 1) * e[k];
    best = std::max(best, w);
  }
  return best;
}

}  // namespace

Landscape make_landscape(const LandscapeRecipe& recipe, std::size_t index) {
  recipe.validate();
  Landscape L;
  L.recipe_ = recipe;
  L.index_ = index;
  const auto n = static_cast<std::size_t>(recipe.n);
  L.dim_ = n * static_cast<std::size_t>(recipe.particle_dim);
  L.quotient_ = recipe.construction == Construction::quotient ||
                (recipe.construction == Construction::explicit_poly && recipe.explicit_in_quotient);

  RngStream rng = RngStream(recipe.seed, index).split(0);
  switch (recipe.construction) {
    case Construction::reynolds:
      L.base_ = sample_nhkss(L.dim_, recipe.degree, rng, recipe.homogeneous);
      L.objective_ = reynolds_symmetrize_blocks(L.base_, static_cast<std::size_t>(recipe.particle_dim));
      break;
    case Construction::quotient:
      L.base_ = sample_nhkss(n, recipe.degree, rng, recipe.homogeneous);
      L.objective_ = L.base_;
      break;
    case Construction::explicit_poly:
      L.base_ = *recipe.explicit_base;
      L.objective_ = L.base_;
      break;
  }

  if (recipe.coercive) {
    const auto& spec = *recipe.coercive;
    int d = 0;
    if (!L.quotient_) {
      d = L.objective_.degree().value_or(0);
    } else if (spec.space == CoerciveSpace::quotient) {
      d = L.objective_.degree().value_or(0);
    } else {
      d = weighted_degree(L.objective_);
    }
    const int exponent = spec.exponent.value_or(auto_coercive_exponent(d));
    L.coercive_exponent_ = exponent;
    if (L.quotient_ && spec.space == CoerciveSpace::config) {
      L.config_coercive_c_ = spec.c;
      L.config_coercive_exp_ = exponent;
    } else {
      const std::size_t vars = L.objective_.num_vars();
      L.objective_ = L.objective_ + spec.c * norm_power(vars, static_cast<unsigned>(exponent / 2));
    }
  }
  L.eval_ = std::make_shared<const PolyEvaluator>(L.objective_);
  return L;
}

Landscape explicit_landscape(const MultiPoly& f, ConstraintKind constraint) {
  LandscapeRecipe r;
  r.construction = Construction::explicit_poly;
  r.n = static_cast<int>(f.num_vars());
  r.degree = f.degree().value_or(0);
  r.explicit_base = f;
  r.constraint = constraint;
  return make_landscape(r, 0);
}

double Landscape::value(std::span<const double> x) const {
  return jet(x, 0).value;
}

Jet Landscape::jet(std::span<const double> x, int order) const {
  if (x.size() != dim_) throw std::invalid_argument("arity: landscape expects " + std::to_string(dim_) + " coordinates");
  Jet out;
  if (!quotient_) {
    out = eval_->jet(x, order);
  } else {
    const EspJet e = esp_jet(x, order);
    const Jet p = eval_->jet(std::span<const double>(e.values.data(), static_cast<std::size_t>(e.values.size())), order);
    out.value = p.value;
    if (order >= 1) out.grad = e.jacobian.transpose() * p.grad;
    if (order >= 2) {
      out.hess = e.jacobian.transpose() * p.hess * e.jacobian;
      for (std::size_t k = 0; k < e.hessians.size(); ++k) out.hess += p.grad[static_cast<Eigen::Index>(k)] * e.hessians[k];
    }
  }
  if (config_coercive_c_ != 0.0) {
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const double r2 = v.squaredNorm();
    const int k = config_coercive_exp_ / 2;
    const double c = config_coercive_c_;
    out.value += c * std::pow(r2, k);
    if (order >= 1) out.grad += c * 2.0 * k * std::pow(r2, k - 1) * v;
    if (order >= 2) {
      out.hess.diagonal().array() += c * 2.0 * k * std::pow(r2, k - 1);
      if (k >= 2) out.hess += c * 4.0 * k * (k - 1) * std::pow(r2, k - 2) * (v * v.transpose());
    }
  }
  return out;
}

MultiPoly Landscape::expanded(std::size_t term_cap) const {
  if (!quotient_) return objective_;
  const auto subs = esp_polynomials(dim_);
  MultiPoly f = compose(objective_, subs, term_cap);
  if (config_coercive_c_ != 0.0) f = f + config_coercive_c_ * norm_power(dim_, static_cast<unsigned>(config_coercive_exp_ / 2));
  return f;
}

nlohmann::json Landscape::to_json() const {
  nlohmann::json j;
  j["recipe"] = recipe_.to_json();
  j["index"] = index_;
  j["dim"] = dim_;
  j["base"] = symquot::to_json(base_);
  j[quotient_ ? "quotient_objective" : "objective"] = symquot::to_json(objective_);
  if (coercive_exponent_) {
    j["coercive_exponent"] = *coercive_exponent_;
  } else {
    j["coercive_exponent"] = nullptr;
  }
  return j;
}

}  // namespace symquot
