#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "symquot/critical_search.hpp"
#include "symquot/ensembles.hpp"
#include "symquot/error.hpp"
#include "symquot/io.hpp"
#include "symquot/quotient_geometry.hpp"
#include "symquot/shape_space.hpp"
#include "symquot/symmetry_analysis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace symquot;

namespace {

constexpr int kSchemaVersion = 1;

// Nested JSON objects map onto subcommands: {"seed": 3, "profile": {"n": 4}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  static void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
        item.inputs = {joined};
      } else if (value.is_boolean()) {
        item.inputs = {value.get<bool>() ? "true" : "false"};
      } else if (value.is_null()) {
        throw CLI::ConversionError("config key '" + key + "' is null");
      } else {
        item.inputs = {scalar(value)};
      }
      out.push_back(std::move(item));
    }
  }
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct Global {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out = ".";
  std::string preset = "paper";
  int schema_version = kSchemaVersion;
};

class Run {
 public:
  Run(const Global& g, std::string command) : global_(g), command_(std::move(command)) {}

  json config = json::object();

  void emit(const std::string& name, const std::string& content) { files_.emplace_back(name, content); }

  void finish() {
    const fs::path dir(global_.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("--out: cannot create '" + dir.string() + "': " + ec.message());
    json artifacts = json::array();
    for (const auto& [name, content] : files_) {
      write_text_file(dir / name, content);
      artifacts.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    json manifest = {{"schema_version", kSchemaVersion},
                     {"tool", "symquot"},
                     {"command", command_},
                     {"config", config},
                     {"artifacts", artifacts}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  const Global& global_;
  std::string command_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// Desk preset: counts not given explicitly are scaled down 5x.
template <class T>
void apply_preset(const Global& g, const CLI::Option* opt, T& value) {
  if (g.preset == "desk" && opt->count() == 0) value = std::max<T>(1, value / 5);
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  auto to_int = [&](const std::string& t) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + t + "' as an integer");
    }
  };
  while (std::getline(ss, tok, ',')) {
    const auto dash = tok.find('-', 1);
    if (dash != std::string::npos) {
      const int a = to_int(tok.substr(0, dash)), b = to_int(tok.substr(dash + 1));
      if (b < a) throw ConfigError(what + ": empty range '" + tok + "'");
      for (int v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(to_int(tok));
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

// --- profile ---------------------------------------------------------------------------

struct ProfileArgs {
  std::string construction = "reynolds";
  int n = 3;
  int degree = 3;
  std::string coercive = "auto";
  std::string coercive_space = "config";
  double coercive_c = 1.0;
  std::string constraint = "none";
  bool homogeneous = false;
  int count = 1000;
  std::size_t starts = 1000;
  bool polish = false;
  double eps_accept = 1e-1;
  double dedup_delta = 1e-2;
  double init_box = 2.0;
  CLI::Option* count_opt = nullptr;
  CLI::Option* starts_opt = nullptr;
};

void cmd_profile(const Global& g, ProfileArgs a) {
  apply_preset(g, a.count_opt, a.count);
  apply_preset(g, a.starts_opt, a.starts);

  json rj = {{"construction", a.construction}, {"n", a.n},         {"degree", a.degree},
             {"constraint", a.constraint},     {"seed", g.seed},   {"count", a.count},
             {"homogeneous", a.homogeneous}};
  if (a.coercive == "none") {
    rj["coercive"] = nullptr;
  } else {
    json c = {{"space", a.coercive_space}, {"c", a.coercive_c}};
    if (a.coercive == "auto") {
      c["exponent"] = "auto";
    } else {
      try {
        std::size_t pos = 0;
        c["exponent"] = std::stoi(a.coercive, &pos);
        if (pos != a.coercive.size()) throw std::invalid_argument(a.coercive);
      } catch (const std::exception&) {
        throw ConfigError("--coercive: expected none, auto or an even exponent, got '" + a.coercive + "'");
      }
    }
    rj["coercive"] = c;
  }
  const LandscapeRecipe recipe = LandscapeRecipe::from_json(rj);
  recipe.validate();

  SearchOptions opts;
  opts.polish = a.polish;
  opts.eps_accept = a.eps_accept;
  opts.dedup_delta = a.dedup_delta;
  opts.init_box = a.init_box;
  opts.jobs = g.jobs;
  opts.validate();

  const auto surveys = survey_ensemble(recipe, a.starts, opts);
  const auto profile = symmetry_profile(surveys);

  std::string points = csv_line({"landscape", "t", "energy", "grad_norm", "morse_index", "distinct_values",
                                 "stabilizer_order", "boundary_flag", "polished"});
  std::size_t raw = 0, failed = 0, resampled = 0;
  for (std::size_t i = 0; i < surveys.size(); ++i) {
    raw += surveys[i].raw_hits;
    failed += surveys[i].failed_starts;
    resampled += surveys[i].resampled_starts;
    for (const auto& sp : surveys[i].points) {
      const auto& p = sp.point;
      points += csv_line({std::to_string(i), format_number(sp.t), format_number(p.energy), format_number(p.grad_norm),
                          std::to_string(p.morse_index), std::to_string(p.distinct_values),
                          std::to_string(p.stabilizer_order), p.boundary_flag ? "1" : "0", p.polished ? "1" : "0"});
    }
  }

  json summary = profile.summary_json();
  summary["schema_version"] = kSchemaVersion;
  summary["raw_hits"] = raw;
  summary["failed_starts"] = failed;
  summary["resampled_starts"] = resampled;

  Run run(g, "profile");
  run.config = {{"recipe", recipe.to_json()}, {"starts", a.starts}, {"options", opts.to_json()}, {"preset", g.preset}};
  run.emit("profile.csv", profile.to_csv());
  run.emit("points.csv", points);
  run.emit("summary.json", summary.dump(2) + "\n");
  run.finish();
  std::cout << summary.dump() << "\n";
}

// --- rarity ----------------------------------------------------------------------------

std::string inputs_string(const json& inputs) {
  std::string out;
  for (const auto& [k, v] : inputs.items()) {
    std::string val;
    if (v.is_array()) {
      for (const auto& e : v) val += (val.empty() ? "" : " ") + e.dump();
    } else {
      val = v.dump();
    }
    out += (out.empty() ? "" : ";") + k + "=" + val;
  }
  return out;
}

std::string rational_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  return den == 1 ? big_to_string(num) : big_to_string(num) + "/" + big_to_string(den);
}

double big_log10(const BigInt& b) {
  if (b <= 0) return -INFINITY;
  const std::string digits = big_to_string(b);
  const std::size_t keep = std::min<std::size_t>(digits.size(), 17);
  return std::log10(std::stod(digits.substr(0, keep))) + static_cast<double>(digits.size() - keep);
}

struct RarityArgs {
  int n = 4;
  int d = 3;
  int k = 2;
  std::vector<int> partition{3, 2, 1};
};

void rarity_emit(const Global& g, const std::string& kind, const json& inputs, const std::string& exact, double approx,
                 double lg) {
  std::string csv = csv_line({"kind", "inputs", "exact", "approx", "log10"});
  csv += csv_line({kind, inputs_string(inputs), exact, format_number(approx), format_number(lg)});
  Run run(g, "rarity " + kind);
  run.config = {{"kind", kind}, {"inputs", inputs}};
  run.emit("rarity.csv", csv);
  run.finish();
  std::cout << csv;
}

void rarity_report(const Global& g, const RarityReport& r) {
  rarity_emit(g, r.kind, r.inputs, rational_string(r.fraction), r.approx(), r.log10());
}

void cmd_rarity_involutions(const Global& g, const RarityArgs& a) {
  const BigInt c = count_involutions(a.n);
  rarity_emit(g, "involutions", {{"n", a.n}}, big_to_string(c), static_cast<double>(c), big_log10(c));
}

void cmd_rarity_capacity(const Global& g, const RarityArgs& a) {
  const double r = capacity_ratio(a.n, a.k, a.d);
  const auto exact = capacity_ratio_exact(a.n, a.k, a.d);
  rarity_emit(g, "capacity", {{"n", a.n}, {"k", a.k}, {"d", a.d}}, exact ? rational_string(*exact) : "", r,
              std::log10(r));
}

// --- realroots -------------------------------------------------------------------------

struct RealRootsArgs {
  std::string degrees = "1-8";
  std::string ensembles = "kac,monic_gaussian";
  std::size_t trials = 1'000'000;
  CLI::Option* trials_opt = nullptr;
};

void cmd_realroots(const Global& g, RealRootsArgs a) {
  apply_preset(g, a.trials_opt, a.trials);
  if (a.trials < 1000) throw ConfigError("--trials: must be >= 1000");
  const auto degrees = parse_int_list(a.degrees, "--degrees");
  for (int d : degrees) {
    if (d < 1) throw ConfigError("--degrees: degrees must be >= 1");
  }
  std::vector<UnivariateEnsemble> ens;
  {
    std::stringstream ss(a.ensembles);
    std::string tok;
    while (std::getline(ss, tok, ',')) ens.push_back(univariate_ensemble_from_string(tok));
    if (ens.empty()) throw ConfigError("--ensembles: empty list");
  }
  std::string csv = csv_line({"degree", "ensemble", "p_hat", "std_error", "log_p_over_n2", "trials", "resampled"});
  for (int d : degrees) {
    for (auto e : ens) {
      const RngStream rng = RngStream(g.seed, static_cast<std::uint64_t>(d)).split(static_cast<std::uint64_t>(e));
      const auto est = estimate_real_root_probability(e, d, a.trials, rng, g.jobs);
      const double lp = est.p_hat > 0 ? std::log(est.p_hat) / (static_cast<double>(d) * d) : -INFINITY;
      csv += csv_line({std::to_string(d), to_string(e), format_number(est.p_hat), format_number(est.std_error),
                       format_number(lp), std::to_string(est.trials), std::to_string(est.resampled)});
    }
  }
  Run run(g, "realroots");
  json names = json::array();
  for (auto e : ens) names.push_back(to_string(e));
  run.config = {{"degrees", degrees}, {"ensembles", names}, {"trials", a.trials}, {"seed", g.seed},
                {"preset", g.preset}};
  run.emit("realroots.csv", csv);
  run.finish();
  std::cout << csv;
}

// --- lj --------------------------------------------------------------------------------

struct LjArgs {
  std::string file;
  std::size_t window = 500;
  double tol = kIsotropyTolerance;
  std::string rho = "1,0.1,0.01";
};

void cmd_lj_analyze(const Global& g, const LjArgs& a) {
  const std::string text = read_text_file(a.file);
  const auto blocks = parse_configurations(text, a.file);
  struct Row {
    std::size_t index;
    double energy;
    IsotropyReport iso;
  };
  std::vector<Row> rows;
  std::string csv = csv_line({"index", "line", "n", "energy_file", "energy", "vertex_order", "edge_order",
                              "inclusion_holds", "rank_deficient", "exhaustive"});
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    Row r{i, lj_energy(b.cfg), isotropy(b.cfg, a.tol)};
    csv += csv_line({std::to_string(i), std::to_string(b.line), std::to_string(b.cfg.n()),
                     b.energy ? format_number(*b.energy) : "", format_number(r.energy),
                     std::to_string(r.iso.vertex_order), std::to_string(r.iso.edge_order),
                     r.iso.inclusion_holds ? "1" : "0", r.iso.rank_deficient ? "1" : "0",
                     r.iso.exhaustive ? "1" : "0"});
    rows.push_back(std::move(r));
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rows[x].energy < rows[y].energy; });
  std::vector<bool> flags;
  for (std::size_t i : order) flags.push_back(rows[i].iso.edge_order > 1);
  const auto curve = moving_average_density(flags, a.window);
  const std::size_t symmetric = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));

  json summary = {{"schema_version", kSchemaVersion},
                  {"configurations", rows.size()},
                  {"symmetric", symmetric},
                  {"window", curve.window},
                  {"dataset_mean", curve.baseline}};
  Run run(g, "lj analyze");
  run.config = {{"file", a.file}, {"input_sha256", sha256_hex(text)}, {"window", a.window}, {"tol", a.tol}};
  run.emit("lj_analysis.csv", csv);
  run.emit("density.csv", curve.to_csv());
  run.emit("lj_summary.json", summary.dump(2) + "\n");
  run.finish();
  std::cout << summary.dump() << "\n";
}

void cmd_lj_dive(const Global& g, const LjArgs& a) {
  const auto rhos = parse_real_list(a.rho, "--rho");
  std::string csv = csv_line({"rho", "energy_re", "energy_im", "scaled_energy", "predicted", "relative_error",
                              "r12_sq_re", "r13_sq_re", "r13_sq_im"});
  for (double rho : rhos) {
    const auto r = unbounded_dive(rho);
    csv += csv_line({format_number(rho), format_number(r.energy.real()), format_number(r.energy.imag()),
                     format_number(r.scaled_energy), format_number(r.predicted),
                     format_number(std::abs(r.scaled_energy - r.predicted) / std::abs(r.predicted)),
                     format_number(r.r12_sq.real()), format_number(r.r13_sq.real()), format_number(r.r13_sq.imag())});
  }
  Run run(g, "lj dive");
  run.config = {{"rho", rhos}};
  run.emit("dive.csv", csv);
  run.finish();
  std::cout << csv;
}

// --- calibrate -------------------------------------------------------------------------

struct CalibrateArgs {
  int n = 4;
  int k = 2;
  int d = 14;
  int runs = 100;
  CLI::Option* runs_opt = nullptr;
};

void cmd_calibrate(const Global& g, CalibrateArgs a) {
  apply_preset(g, a.runs_opt, a.runs);
  if (a.n < 2 || a.k < 1 || a.d < 1) throw ConfigError("calibrate: need n >= 2, k >= 1, d >= 1");
  SearchOptions opts;
  opts.jobs = g.jobs;
  const auto r = calibrate(a.n, a.k, a.d, a.runs, g.seed, opts);
  json out = r.to_json();
  out["schema_version"] = kSchemaVersion;
  Run run(g, "calibrate");
  run.config = {{"n", a.n}, {"k", a.k}, {"d", a.d}, {"runs", a.runs}, {"seed", g.seed}, {"preset", g.preset}};
  run.emit("calibration.json", out.dump(2) + "\n");
  run.finish();
  std::cout << out.dump() << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) return 1;
  if (dynamic_cast<const InputError*>(&e)) return 2;
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symquot: symmetric landscapes, quotient geometry and rarity experiments"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; nested objects configure subcommands");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->always_capture_default();

  Global g;
  app.add_option("--seed", g.seed, "Master seed")->envname("SYMQUOT_SEED");
  app.add_option("--jobs", g.jobs, "Worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--preset", g.preset, "paper or desk (desk scales counts down 5x)")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--schema_version", g.schema_version)->group("");

  std::function<void()> action;

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Energy-sorted symmetry profile over a landscape ensemble");
  profile->fallthrough();
  profile->add_option("--construction", pa.construction)->check(CLI::IsMember({"reynolds", "quotient"}));
  profile->add_option("--n", pa.n, "Variables");
  profile->add_option("--degree", pa.degree);
  profile->add_option("--coercive", pa.coercive, "none, auto or an even exponent");
  profile->add_option("--coercive_space", pa.coercive_space)->check(CLI::IsMember({"config", "quotient"}));
  profile->add_option("--coercive_c", pa.coercive_c);
  profile->add_option("--constraint", pa.constraint)->check(CLI::IsMember({"none", "x_sphere", "es_sphere"}));
  profile->add_flag("--homogeneous", pa.homogeneous);
  pa.count_opt = profile->add_option("--count", pa.count, "Landscapes");
  pa.starts_opt = profile->add_option("--starts", pa.starts, "Newton starts per landscape");
  profile->add_flag("--polish", pa.polish, "Polish accepted points to eps_polish before scoring");
  profile->add_option("--eps_accept", pa.eps_accept);
  profile->add_option("--dedup_delta", pa.dedup_delta);
  profile->add_option("--init_box", pa.init_box);
  profile->callback([&] { action = [&] { cmd_profile(g, pa); }; });

  RarityArgs ra;
  auto* rarity = app.add_subcommand("rarity", "Exact volume fractions and counts");
  rarity->require_subcommand(1);
  rarity->fallthrough();
  auto* r_sn = rarity->add_subcommand("sn", "1 / #Inv(S_n)");
  r_sn->add_option("--n", ra.n);
  r_sn->callback([&] { action = [&] { rarity_report(g, real_image_fraction_sn(ra.n)); }; });
  auto* r_shape = rarity->add_subcommand("shape", "Shape-space fraction");
  r_shape->add_option("--n", ra.n);
  r_shape->add_option("--d", ra.d);
  r_shape->callback([&] { action = [&] { rarity_report(g, real_image_fraction_shape(ra.n, ra.d)); }; });
  auto* r_stratum = rarity->add_subcommand("stratum", "Stratum fraction for a partition");
  r_stratum->add_option("--partition", ra.partition, "Block sizes, comma separated")->delimiter(',');
  r_stratum->callback([&] { action = [&] { rarity_report(g, real_image_fraction_stratum(ra.partition)); }; });
  auto* r_inv = rarity->add_subcommand("involutions", "#Inv(S_n)");
  r_inv->add_option("--n", ra.n);
  r_inv->callback([&] { action = [&] { cmd_rarity_involutions(g, ra); }; });
  auto* r_cap = rarity->add_subcommand("capacity", "Counting-heuristic symmetric fraction");
  r_cap->add_option("--n", ra.n);
  r_cap->add_option("--k", ra.k);
  r_cap->add_option("--d", ra.d);
  r_cap->callback([&] { action = [&] { cmd_rarity_capacity(g, ra); }; });
  for (auto* s : {r_sn, r_shape, r_stratum, r_inv, r_cap}) s->fallthrough();

  RealRootsArgs rr;
  auto* realroots = app.add_subcommand("realroots", "Monte-Carlo real-rootedness probabilities");
  realroots->fallthrough();
  realroots->add_option("--degrees", rr.degrees, "List or range, e.g. 1-8 or 2,4,6");
  realroots->add_option("--ensembles", rr.ensembles, "kac, monic_gaussian");
  rr.trials_opt = realroots->add_option("--trials", rr.trials);
  realroots->callback([&] { action = [&] { cmd_realroots(g, rr); }; });

  LjArgs la;
  auto* lj = app.add_subcommand("lj", "Lennard-Jones configurations");
  lj->require_subcommand(1);
  lj->fallthrough();
  auto* lj_an = lj->add_subcommand("analyze", "Energy, isotropy and symmetry density of an xyz file");
  lj_an->fallthrough();
  lj_an->add_option("file", la.file, "xyz file with energy= comments")->required();
  lj_an->add_option("--window", la.window)->check(CLI::PositiveNumber);
  lj_an->add_option("--tol", la.tol);
  lj_an->callback([&] { action = [&] { cmd_lj_analyze(g, la); }; });
  auto* lj_dive = lj->add_subcommand("dive", "Complex three-particle dive");
  lj_dive->fallthrough();
  lj_dive->add_option("--rho", la.rho, "Comma-separated radii");
  lj_dive->callback([&] { action = [&] { cmd_lj_dive(g, la); }; });

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("calibrate", "Single-start symmetric/asymmetric calibration");
  cal->fallthrough();
  cal->add_option("--n", ca.n, "Particles");
  cal->add_option("--k", ca.k, "Coordinates per particle");
  cal->add_option("--d", ca.d, "Degree");
  ca.runs_opt = cal->add_option("--runs", ca.runs);
  cal->callback([&] { action = [&] { cmd_calibrate(g, ca); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ConfigError& e) {
    std::cerr << "error: config: unknown or invalid key (" << e.what() << ")\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (g.schema_version != kSchemaVersion) {
      throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion) + ", got " +
                        std::to_string(g.schema_version));
    }
    if (action) action();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
