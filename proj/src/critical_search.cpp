#include "symquot/critical_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symquot/error.hpp"
#include "symquot/io.hpp"
#include "symquot/parallel.hpp"
#include "symquot/quotient_geometry.hpp"
#include "symquot/symmetry_analysis.hpp"

namespace symquot {

// --- options --------------------------------------------------------------------

void SearchOptions::validate() const {
  if (!(eps_accept > 0.0) || !(eps_polish > 0.0)) throw ConfigError("search: tolerances must be positive");
  if (eps_polish > eps_accept) throw ConfigError("search: eps_polish must not exceed eps_accept");
  if (max_iters < 1) throw ConfigError("search: max_iters must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("search: beta must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 0.5)) throw ConfigError("search: armijo must lie in (0, 0.5)");
  if (!(init_box > 0.0)) throw ConfigError("search: init_box must be positive");
  if (!(dedup_delta > 0.0)) throw ConfigError("search: dedup_delta must be positive");
}

nlohmann::json SearchOptions::to_json() const {
  return {{"eps_accept", eps_accept}, {"eps_polish", eps_polish}, {"max_iters", max_iters},
          {"beta", beta}, {"armijo", armijo}, {"lambda_min", lambda_min},
          {"max_condition", max_condition}, {"init_box", init_box}, {"dedup_delta", dedup_delta},
          {"divergence_radius", divergence_radius}, {"morse_threshold", morse_threshold},
          {"constraint_tol", constraint_tol}, {"polish", polish}, {"max_resamples", max_resamples}};
}

SearchOptions SearchOptions::from_json(const nlohmann::json& j) {
  SearchOptions o;
  if (!j.is_object()) throw ConfigError("search: expected a JSON object");
  auto get = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(dst);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("search field '") + key + "': " + e.what());
    }
  };
  get("eps_accept", o.eps_accept);
  get("eps_polish", o.eps_polish);
  get("max_iters", o.max_iters);
  get("beta", o.beta);
  get("armijo", o.armijo);
  get("lambda_min", o.lambda_min);
  get("max_condition", o.max_condition);
  get("init_box", o.init_box);
  get("dedup_delta", o.dedup_delta);
  get("divergence_radius", o.divergence_radius);
  get("morse_threshold", o.morse_threshold);
  get("constraint_tol", o.constraint_tol);
  get("polish", o.polish);
  get("max_resamples", o.max_resamples);
  o.validate();
  return o;
}

// --- free Newton --------------------------------------------------------------------

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Minimizer of the local quadratic model with H + lambda I, lambda raised
// from 0, then lambda_min, by factors of ten until the shifted spectrum has
// condition number below the bound.
Eigen::VectorXd regularized_step(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const SearchOptions& opts) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  double lambda = 0.0;
  for (;;) {
    const Eigen::VectorXd s = ev.array() + lambda;
    const double lo = s.cwiseAbs().minCoeff();
    const double hi = s.cwiseAbs().maxCoeff();
    if (lo > 0.0 && hi / lo <= opts.max_condition) {
      const Eigen::VectorXd coeff = (es.eigenvectors().transpose() * g).array() / s.array();
      return -(es.eigenvectors() * coeff);
    }
    lambda = lambda == 0.0 ? opts.lambda_min * scale : lambda * 10.0;
    if (lambda > 1e20 * scale) throw NumericalError("regularization failed");
  }
}

}  // namespace

NewtonResult newton_solve(const Objective& f, Eigen::VectorXd x0, double target, const SearchOptions& opts,
                          bool stop_on_stall) {
  NewtonResult res;
  res.x = std::move(x0);
  auto eval = [&f](const Eigen::VectorXd& v, int order) {
    return f(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), order);
  };
  std::optional<Jet> carried;
  for (int it = 0; it <= opts.max_iters; ++it) {
    res.iterations = it;
    const Jet J = carried ? std::move(*carried) : eval(res.x, 2);
    carried.reset();
    if (!std::isfinite(J.value) || !finite(J.grad) || !J.hess.allFinite()) {
      res.status = NewtonStatus::nonfinite;
      return res;
    }
    res.grad_norm = J.grad.norm();
    if (res.grad_norm < target) {
      res.status = NewtonStatus::converged;
      return res;
    }
    if (it == opts.max_iters) break;
    const Eigen::VectorXd d = regularized_step(J.hess, J.grad, opts);
    const double merit = res.grad_norm * res.grad_norm;
    double alpha = 1.0;
    Eigen::VectorXd next = res.x + d;
    for (int bt = 0; bt < 40; ++bt) {
      next = res.x + alpha * d;
      if (next.norm() <= opts.divergence_radius) {
        // Backtracked trials only need the gradient; the Hessian is formed
        // once a trial is accepted.
        Jet Jn = eval(next, bt == 0 ? 2 : 1);
        const double m = Jn.grad.squaredNorm();
        if (std::isfinite(m) && m <= (1.0 - 2.0 * opts.armijo * alpha) * merit) {
          carried = bt == 0 ? std::move(Jn) : eval(next, 2);
          break;
        }
      }
      alpha *= opts.beta;
    }
    // No sufficient decrease along d: take the full step and let the
    // divergence guard catch runaways.
    if (!carried && stop_on_stall) {
      res.status = NewtonStatus::stalled;
      return res;
    }
    if (!carried) next = res.x + d;
    res.x = std::move(next);
    if (!finite(res.x) || res.x.norm() > opts.divergence_radius) {
      res.status = NewtonStatus::diverged;
      return res;
    }
  }
  res.status = NewtonStatus::exhausted;
  return res;
}

namespace {

Objective as_objective(const Landscape& f) {
  return [&f](std::span<const double> x, int order) { return f.jet(x, order); };
}

Eigen::VectorXd to_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

int count_negative(const Eigen::MatrixXd& H, double threshold) {
  if (H.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("morse_index: eigenvalue solve failed");
  return static_cast<int>((es.eigenvalues().array() < threshold).count());
}

}  // namespace

std::optional<CriticalPoint> damped_newton(const Objective& f, std::span<const double> x0, const SearchOptions& opts) {
  const Jet j0 = f(x0, 0);
  if (!std::isfinite(j0.value)) throw NumericalError("damped_newton: non-finite objective at start");
  const auto accept = newton_solve(f, to_vector(x0), opts.eps_accept, opts);
  if (accept.status != NewtonStatus::converged) return std::nullopt;
  NewtonResult final = accept;
  bool polished = false;
  if (opts.polish) {
    auto pol = newton_solve(f, accept.x, opts.eps_polish, opts, true);
    if (pol.status == NewtonStatus::converged) {
      final = std::move(pol);
      polished = true;
    }
  }
  CriticalPoint cp;
  cp.x = to_std(final.x);
  const Jet J = f(cp.x, 2);
  cp.energy = J.value;
  cp.grad_norm = J.grad.norm();
  cp.polished = polished || cp.grad_norm < opts.eps_polish;
  cp.morse_index = count_negative(J.hess, opts.morse_threshold);
  return cp;
}

std::optional<CriticalPoint> damped_newton(const Landscape& f, std::span<const double> x0, const SearchOptions& opts) {
  return damped_newton(as_objective(f), x0, opts);
}

// --- constrained Newton ------------------------------------------------------------

ConstraintJet constraint_jet(ConstraintKind kind, std::span<const double> x) {
  const auto N = static_cast<Eigen::Index>(x.size());
  ConstraintJet c;
  const Eigen::VectorXd v = to_vector(x);
  switch (kind) {
    case ConstraintKind::none:
      c.grad = Eigen::VectorXd::Zero(N);
      c.hess = Eigen::MatrixXd::Zero(N, N);
      break;
    case ConstraintKind::x_sphere:
      c.value = v.squaredNorm() - 1.0;
      c.grad = 2.0 * v;
      c.hess = 2.0 * Eigen::MatrixXd::Identity(N, N);
      break;
    case ConstraintKind::es_sphere: {
      const EspJet e = esp_jet(x, 2);
      c.value = e.values.squaredNorm() - 1.0;
      c.grad = 2.0 * e.jacobian.transpose() * e.values;
      c.hess = 2.0 * e.jacobian.transpose() * e.jacobian;
      for (std::size_t k = 0; k < e.hessians.size(); ++k) c.hess += 2.0 * e.values[static_cast<Eigen::Index>(k)] * e.hessians[k];
      break;
    }
  }
  return c;
}

std::optional<Eigen::VectorXd> retract(ConstraintKind kind, const Eigen::VectorXd& x) {
  switch (kind) {
    case ConstraintKind::none:
      return x;
    case ConstraintKind::x_sphere: {
      const double r = x.norm();
      if (!(r > 0.0) || !std::isfinite(r)) return std::nullopt;
      return Eigen::VectorXd(x / r);
    }
    case ConstraintKind::es_sphere: {
      // |e(s x)|^2 = sum_k s^{2k} e_k(x)^2 is increasing in s > 0.
      const auto e = esp(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
      std::vector<double> w(e.e.size());
      double total = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = e.e[k] * e.e[k];
        total += w[k];
      }
      if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
      auto h = [&](double s) {
        double acc = 0.0, p = 1.0;
        const double s2 = s * s;
        for (double wk : w) {
          p *= s2;
          acc += wk * p;
        }
        return acc - 1.0;
      };
      auto dh = [&](double s) {
        double acc = 0.0, p = 1.0 / s;
        const double s2 = s * s;
        for (std::size_t k = 0; k < w.size(); ++k) {
          p *= s2;
          acc += 2.0 * static_cast<double>(k + 1) * w[k] * p;
        }
        return acc;
      };
      double lo = 0.0, hi = 1.0;
      int guard = 0;
      while (h(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) return std::nullopt;
      }
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      double s = 0.5 * (lo + hi);
      for (int it = 0; it < 5; ++it) {
        const double d = dh(s);
        if (!(d > 0.0)) break;
        const double next = s - h(s) / d;
        if (!(next > 0.0)) break;
        s = next;
      }
      return Eigen::VectorXd(s * x);
    }
  }
  return std::nullopt;
}

namespace {

struct TangentState {
  Jet f;
  ConstraintJet g;
  double mu = 0.0;
  Eigen::VectorXd r;  // tangent gradient
  Eigen::MatrixXd Z;  // orthonormal tangent basis
};

std::optional<TangentState> tangent_state(const Objective& f, ConstraintKind kind, const Eigen::VectorXd& x, int order) {
  TangentState st;
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  st.f = f(xs, order);
  st.g = constraint_jet(kind, xs);
  const double gg = st.g.grad.squaredNorm();
  if (!(gg > 1e-24)) return std::nullopt;
  st.mu = st.g.grad.dot(st.f.grad) / gg;
  st.r = st.f.grad - st.mu * st.g.grad;
  if (order >= 2) {
    const Eigen::Index N = x.size();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(st.g.grad / std::sqrt(gg));
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, N);
    st.Z = Q.rightCols(N - 1);
  }
  return st;
}

struct ConstrainedRun {
  Eigen::VectorXd x;
  double r_norm = 0.0;
  bool converged = false;
};

std::optional<ConstrainedRun> constrained_solve(const Objective& f, Eigen::VectorXd x, ConstraintKind kind,
                                                double target, const SearchOptions& opts, bool stop_on_stall = false) {
  for (int it = 0; it <= opts.max_iters; ++it) {
    auto st = tangent_state(f, kind, x, 2);
    if (!st) return std::nullopt;
    if (!std::isfinite(st->f.value) || !finite(st->r)) return std::nullopt;
    const double rn = st->r.norm();
    if (rn < target && std::abs(st->g.value) <= opts.constraint_tol) return ConstrainedRun{x, rn, true};
    if (it == opts.max_iters) break;
    const Eigen::MatrixXd L = st->f.hess - st->mu * st->g.hess;
    const Eigen::MatrixXd R = st->Z.transpose() * L * st->Z;
    const Eigen::VectorXd dz = regularized_step(R, st->Z.transpose() * st->r, opts);
    const Eigen::VectorXd dx = st->Z * dz;
    const double merit = rn * rn;
    double alpha = 1.0;
    std::optional<Eigen::VectorXd> next;
    for (int bt = 0; bt < 40; ++bt) {
      auto cand = retract(kind, x + alpha * dx);
      if (cand && cand->norm() <= opts.divergence_radius) {
        auto sn = tangent_state(f, kind, *cand, 1);
        if (sn && sn->r.allFinite() && sn->r.squaredNorm() <= (1.0 - 2.0 * opts.armijo * alpha) * merit) {
          next = std::move(cand);
          break;
        }
      }
      alpha *= opts.beta;
    }
    if (!next && stop_on_stall) return ConstrainedRun{x, rn, false};
    if (!next) next = retract(kind, x + dx);
    if (!next) return std::nullopt;
    x = std::move(*next);
    if (!finite(x) || x.norm() > opts.divergence_radius) return std::nullopt;
  }
  return ConstrainedRun{x, 0.0, false};
}

}  // namespace

std::optional<CriticalPoint> constrained_newton(const Objective& f, std::span<const double> x0,
                                                ConstraintKind manifold, const SearchOptions& opts) {
  if (manifold == ConstraintKind::none) return damped_newton(f, x0, opts);
  const Jet j0 = f(x0, 0);
  if (!std::isfinite(j0.value)) throw NumericalError("constrained_newton: non-finite objective at start");
  auto start = retract(manifold, to_vector(x0));
  if (!start) return std::nullopt;
  auto accept = constrained_solve(f, *start, manifold, opts.eps_accept, opts);
  if (!accept || !accept->converged) return std::nullopt;
  ConstrainedRun final = *accept;
  bool polished = false;
  if (opts.polish) {
    auto pol = constrained_solve(f, accept->x, manifold, opts.eps_polish, opts, true);
    if (pol && pol->converged) {
      final = *pol;
      polished = true;
    }
  }
  auto st = tangent_state(f, manifold, final.x, 2);
  if (!st) return std::nullopt;
  CriticalPoint cp;
  cp.x = to_std(final.x);
  cp.energy = st->f.value;
  cp.grad_norm = st->r.norm();
  cp.constraint_residual = std::abs(st->g.value);
  cp.polished = polished || cp.grad_norm < opts.eps_polish;
  cp.morse_index = count_negative(st->Z.transpose() * (st->f.hess - st->mu * st->g.hess) * st->Z, opts.morse_threshold);
  return cp;
}

std::optional<CriticalPoint> constrained_newton(const Landscape& f, std::span<const double> x0,
                                                ConstraintKind manifold, const SearchOptions& opts) {
  return constrained_newton(as_objective(f), x0, manifold, opts);
}

int morse_index(const Objective& f, std::span<const double> x, ConstraintKind manifold, const SearchOptions& opts) {
  if (manifold == ConstraintKind::none) return count_negative(f(x, 2).hess, opts.morse_threshold);
  auto st = tangent_state(f, manifold, to_vector(x), 2);
  if (!st) throw NumericalError("morse_index: singular constraint point");
  return count_negative(st->Z.transpose() * (st->f.hess - st->mu * st->g.hess) * st->Z, opts.morse_threshold);
}

int morse_index(const Landscape& f, std::span<const double> x, const SearchOptions& opts) {
  return morse_index(as_objective(f), x, f.constraint(), opts);
}

// --- deduplication -----------------------------------------------------------------------

std::vector<double> canonicalize(std::span<const double> x, std::size_t block) {
  if (block == 0 || x.size() % block != 0) throw std::invalid_argument("canonicalize: size not a multiple of block");
  const std::size_t n = x.size() / block;
  std::vector<std::vector<double>> blocks(n);
  for (std::size_t p = 0; p < n; ++p) blocks[p].assign(x.begin() + static_cast<std::ptrdiff_t>(p * block),
                                                      x.begin() + static_cast<std::ptrdiff_t>((p + 1) * block));
  std::sort(blocks.begin(), blocks.end(), std::greater<>());
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<DedupClass> dedup_by_permutation(const std::vector<std::vector<double>>& points, double delta,
                                             std::span<const double> grad_norms, std::size_t block) {
  if (!(delta > 0.0)) throw std::invalid_argument("dedup_by_permutation: delta must be positive");
  if (!grad_norms.empty() && grad_norms.size() != points.size()) {
    throw std::invalid_argument("dedup_by_permutation: grad_norms size mismatch");
  }
  std::vector<DedupClass> classes;
  std::vector<std::vector<std::vector<double>>> member_forms;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto c = canonicalize(points[i], block);
    std::size_t target = classes.size();
    for (std::size_t k = 0; k < classes.size() && target == classes.size(); ++k) {
      for (const auto& m : member_forms[k]) {
        if (m.size() != c.size()) continue;
        double dist = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) dist = std::max(dist, std::abs(m[j] - c[j]));
        if (dist <= delta) {
          target = k;
          break;
        }
      }
    }
    if (target == classes.size()) {
      classes.push_back({i, {}, c});
      member_forms.emplace_back();
    }
    auto& cls = classes[target];
    cls.members.push_back(i);
    member_forms[target].push_back(std::move(c));
    if (!grad_norms.empty() && grad_norms[i] < grad_norms[cls.representative]) cls.representative = i;
  }
  return classes;
}

// --- surveys -----------------------------------------------------------------------------

namespace {

struct StartOutcome {
  std::optional<CriticalPoint> point;
  std::size_t resampled = 0;
  bool failed = false;
};

}  // namespace

SurveyResult survey(const Landscape& f, std::size_t n_starts, const RngStream& rng, const SearchOptions& opts) {
  if (n_starts < 1) throw std::invalid_argument("survey: n_starts must be >= 1");
  opts.validate();
  const std::size_t dim = f.dim();
  const auto block = static_cast<std::size_t>(f.recipe().particle_dim);
  const ConstraintKind kind = f.constraint();
  const Objective obj = as_objective(f);

  std::vector<StartOutcome> outcomes(n_starts);
  parallel_for(n_starts, opts.jobs, [&](std::size_t i) {
    RngStream s = rng.split(i);
    auto& out = outcomes[i];
    std::vector<double> x0(dim);
    for (int attempt = 0;; ++attempt) {
      for (auto& v : x0) v = s.uniform(-opts.init_box, opts.init_box);
      if (kind == ConstraintKind::none || retract(kind, to_vector(x0))) break;
      ++out.resampled;
      if (attempt >= opts.max_resamples) {
        out.failed = true;
        return;
      }
    }
    out.point = kind == ConstraintKind::none ? damped_newton(obj, x0, opts) : constrained_newton(obj, x0, kind, opts);
    out.failed = !out.point.has_value();
  });

  SurveyResult res;
  res.recipe = f.recipe().to_json();
  res.landscape_index = f.index();
  res.seed = rng.seed();
  res.stream_id = rng.stream_id();
  res.options = opts;
  res.n_starts = n_starts;
  std::vector<std::vector<double>> hits;
  std::vector<double> norms;
  std::vector<const CriticalPoint*> hit_points;
  for (const auto& o : outcomes) {
    res.resampled_starts += o.resampled;
    if (o.failed) ++res.failed_starts;
    if (o.point) {
      hits.push_back(o.point->x);
      norms.push_back(o.point->grad_norm);
      hit_points.push_back(&*o.point);
    }
  }
  res.raw_hits = hits.size();
  const auto classes = dedup_by_permutation(hits, opts.dedup_delta, norms, block);
  res.dedup_count = classes.size();
  for (const auto& cls : classes) {
    CriticalPoint cp = *hit_points[cls.representative];
    cp.x = canonicalize(cp.x, block);
    const auto stab = block_stabilizer(cp.x, block, opts.dedup_delta);
    cp.stabilizer_order = stab.order;
    cp.distinct_values = block == 1 ? distinct_values(cp.x, opts.dedup_delta) : static_cast<int>(stab.partition.size());
    cp.boundary_flag = boundary_classify(stab.order) == PointVerdict::boundary;
    res.points.push_back({0.0, std::move(cp)});
  }
  std::stable_sort(res.points.begin(), res.points.end(), [](const SurveyPoint& a, const SurveyPoint& b) {
    if (a.point.energy != b.point.energy) return a.point.energy < b.point.energy;
    return a.point.x < b.point.x;
  });
  const std::size_t K = res.points.size();
  for (std::size_t i = 0; i < K; ++i) res.points[i].t = K > 1 ? static_cast<double>(i) / static_cast<double>(K - 1) : 0.0;
  return res;
}

nlohmann::json SurveyResult::to_json() const {
  return {{"schema_version", 1},
          {"recipe", recipe},
          {"landscape_index", landscape_index},
          {"seed", seed},
          {"stream_id", stream_id},
          {"tolerances", options.to_json()},
          {"n_starts", n_starts},
          {"raw_hits", raw_hits},
          {"dedup_count", dedup_count},
          {"failed_starts", failed_starts},
          {"resampled_starts", resampled_starts}};
}

std::string SurveyResult::to_csv() const {
  std::vector<std::string> header{"t", "energy", "grad_norm", "morse_index", "distinct_values", "stabilizer_order",
                                  "boundary_flag"};
  const std::size_t n = points.empty() ? 0 : points.front().point.x.size();
  for (std::size_t i = 0; i < n; ++i) header.push_back("x_" + std::to_string(i + 1));
  std::string out = csv_line(header);
  for (const auto& sp : points) {
    const auto& p = sp.point;
    std::vector<std::string> row{format_number(sp.t), format_number(p.energy), format_number(p.grad_norm),
                                 std::to_string(p.morse_index), std::to_string(p.distinct_values),
                                 std::to_string(p.stabilizer_order), p.boundary_flag ? "1" : "0"};
    for (double v : p.x) row.push_back(format_number(v));
    out += csv_line(row);
  }
  return out;
}

Objective restricted_objective(const Landscape& f, const Eigen::MatrixXd& embedding) {
  if (static_cast<std::size_t>(embedding.rows()) != f.dim()) throw std::invalid_argument("arity: embedding rows");
  return [&f, A = embedding](std::span<const double> z, int order) {
    const Eigen::VectorXd x = A * to_vector(z);
    const Jet J = f.jet(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), order);
    Jet out;
    out.value = J.value;
    if (order >= 1) out.grad = A.transpose() * J.grad;
    if (order >= 2) out.hess = A.transpose() * J.hess * A;
    return out;
  };
}

// --- calibration ---------------------------------------------------------------------------

nlohmann::json CalibrationResult::to_json() const {
  return {{"runs", runs},
          {"asymmetric", asymmetric},
          {"asymmetric_fraction", fraction},
          {"std_error", std_error},
          {"failed_starts", failed_starts},
          {"capacity_ratio", capacity_ratio},
          {"predicted_asymmetric_fraction", std::max(0.0, 1.0 - capacity_ratio)},
          {"stabilizer_orders", stabilizer_orders}};
}

CalibrationResult calibrate(int n, int k, int d, int runs, std::uint64_t seed, const SearchOptions& opts) {
  if (runs < 1) throw ConfigError("calibrate: runs must be >= 1");
  opts.validate();
  LandscapeRecipe recipe;
  recipe.construction = Construction::reynolds;
  recipe.n = n;
  recipe.particle_dim = k;
  recipe.degree = d;
  recipe.seed = seed;
  recipe.count = runs;
  recipe.validate();

  constexpr int kMaxAttempts = 100;
  struct RunOutcome {
    long long order = 0;  // 0 = no converged start
    int failed = 0;
  };
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(runs));
  SearchOptions serial = opts;
  serial.jobs = 1;
  parallel_for(outcomes.size(), opts.jobs, [&](std::size_t r) {
    const Landscape L = make_landscape(recipe, r);
    std::vector<double> x0(L.dim());
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      RngStream s = RngStream(seed, r).split(1 + static_cast<std::uint64_t>(attempt));
      for (auto& v : x0) v = s.uniform(-serial.init_box, serial.init_box);
      auto p = damped_newton(L, x0, serial);
      if (p) {
        outcomes[r].order = block_stabilizer(p->x, static_cast<std::size_t>(k), serial.dedup_delta).order;
        return;
      }
      ++outcomes[r].failed;
    }
  });
  CalibrationResult res;
  for (const auto& o : outcomes) {
    res.failed_starts += o.failed;
    if (o.order == 0) continue;
    ++res.runs;
    res.stabilizer_orders.push_back(o.order);
    if (o.order == 1) ++res.asymmetric;
  }
  if (res.runs > 0) {
    res.fraction = static_cast<double>(res.asymmetric) / res.runs;
    res.std_error = std::sqrt(res.fraction * (1.0 - res.fraction) / res.runs);
  }
  res.capacity_ratio = symquot::capacity_ratio(n, k, d);
  return res;
}

}  // namespace symquot
