#pragma once

// Experiment configuration: one JSON document per run, validated against the
// schema of the chosen subcommand. Unknown keys are errors.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/error.hpp"
#include "plap/field.hpp"
#include "plap/params.hpp"

namespace plap {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"roots", "shoot", "blowup", "martin", "grid", "bochner", "all"};
  return names;
}

struct RootsBlock {
  std::size_t trials = 10000;
  std::size_t hardy_trials = 1000;
  double perturbation = 0.1;
};

struct ShootBlock {
  double r0 = 1.0;
  double r_max = 40.0;
  std::size_t samples = 2001;
  // second fitting window as fractions of r_max; the first is [1/2, 1]
  std::array<double, 2> window2{0.25, 0.5};
  std::vector<double> riccati_p{1.5, 2.0, 3.0};
  std::vector<double> riccati_lambda{0.5, 1.0, 2.0};
  double riccati_T = 50.0;
};

struct BlowupBlock {
  std::vector<double> radii{0.1, 0.03, 0.01, 0.003, 0.001};
  std::vector<double> shifts{10.0, 20.0, 40.0, 80.0, 160.0};
  double origin_window = 10.0;
  double translation_window = 2.0;
  std::size_t window_samples = 401;
};

struct MartinBlock {
  double t = 1000.0;
  std::vector<double> x{1.0, 0.0, 0.0};
  std::vector<double> xi{1.0, 0.0, 0.0};
  std::size_t samples = 8001;
};

struct GridBlock {
  std::vector<double> h{1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::array<double, 2> xi{0.6, 0.8};
  Rect rect{};
  double tol = 1e-9;
  int max_iters = 50;
};

struct BochnerBlock {
  std::vector<double> h{1.0 / 16, 1.0 / 32, 1.0 / 64};
  double exact_h = 0.25;  // exact exponential is checked on [-1,1]^2
};

struct ExperimentConfig {
  std::string subcommand;
  std::optional<ProblemParams> params;
  std::uint64_t seed = 20240601;
  std::string out;
  bool parallel = false;
  RootsBlock roots;
  ShootBlock shoot;
  BlowupBlock blowup;
  MartinBlock martin;
  GridBlock grid;
  BochnerBlock bochner;

  static ExperimentConfig parse(const nlohmann::json& doc, const std::string& subcommand);
  static ExperimentConfig load(const std::string& path, const std::string& subcommand);
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

// Reads typed members of one JSON object; every accessor registers its key as
// known, and finish() rejects the rest.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_ + " must be a JSON object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(where(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where(key) + " must be finite");
    return d;
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    fail(where(key) + " must be an integer");
  }

  std::size_t count(const std::string& key, std::size_t def, std::size_t min) {
    const auto v = integer(key, static_cast<std::int64_t>(def));
    if (v < static_cast<std::int64_t>(min)) fail(where(key) + " must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(where(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def, std::size_t min_len = 1) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail(where(key) + " must contain finite numbers only");
      out.push_back(e.get<double>());
    }
    if (out.size() < min_len) fail(where(key) + " needs at least " + std::to_string(min_len) + " entries");
    return out;
  }

  std::optional<Reader> object(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Reader(j_.at(key), where(key));
  }

  void forbid(const std::string& key, const std::string& why) {
    if (j_.contains(key)) fail(where(key) + " is not accepted here: " + why);
    known_.insert(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!known_.count(it.key())) fail("unknown key " + where(it.key()));
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> known_;
};

inline void positive(double v, const std::string& what) {
  if (!(v > 0.0)) fail(what + " must be positive");
}

// Parameter block, restricted to the keys each subcommand uses.
inline ProblemParams parse_params(Reader& r, const std::string& sub) {
  ProblemParams p;
  const bool planar = sub == "grid" || sub == "bochner";
  const bool hardy = sub == "roots" || sub == "blowup";
  p.n = static_cast<int>(r.integer("n", planar ? 2 : 3));
  p.p = r.number("p", planar && sub == "grid" ? 3.0 : 2.0);
  if (hardy) {
    p.a = r.number("a", 0.0);
    p.mu = r.number("mu", sub == "blowup" ? 0.1875 : 0.0);
  } else {
    r.forbid("a", "the " + sub + " campaign has no weight");
    r.forbid("mu", "the " + sub + " campaign has no Hardy term");
  }
  p.lambda = r.number("lambda", sub == "grid" ? 2.0 : (sub == "roots" ? 0.0 : 1.0));
  if (hardy) {
    if (auto nl = r.object("nonlinearity")) {
      Nonlinearity f;
      f.q = nl->number("q", 0.0);
      f.amplitude = nl->number("amplitude", 1.0);
      nl->finish();
      p.nonlinearity = f;
    }
  } else {
    r.forbid("nonlinearity", "the " + sub + " campaign has no source term");
  }
  r.finish();

  try {
    if (planar) {
      if (p.n != 2) fail("params.n must be 2 for the planar " + sub + " campaign");
      if (!(p.p > 1.0)) fail("params.p must satisfy p > 1");
      if (!(p.lambda > 0.0)) fail("params.lambda must satisfy lambda > 0");
      if (sub == "bochner" && p.p != 2.0) fail("params.p must be 2 for the bochner campaign (p = 2 oracle field)");
    } else if (sub == "shoot" || sub == "martin") {
      if (p.n < 2) fail("params.n must be >= 2");
      if (!(p.p > 1.0)) fail("params.p must satisfy p > 1");
      if (!(p.lambda > 0.0)) fail("params.lambda must satisfy lambda > 0");
    } else {
      p.validate();
      if (sub == "blowup") {
        if (p.a != 0.0) fail("params.a must be 0 for the blowup campaign");
        if (!(p.lambda > 0.0)) fail("params.lambda must satisfy lambda > 0");
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(std::string("params: ") + e.what());
  }
  return p;
}

}  // namespace config_detail

inline ExperimentConfig ExperimentConfig::parse(const nlohmann::json& doc, const std::string& subcommand) {
  using config_detail::fail;
  bool known = false;
  for (const auto& s : subcommands()) known = known || s == subcommand;
  if (!known) fail("unknown subcommand '" + subcommand + "'");

  ExperimentConfig cfg;
  cfg.subcommand = subcommand;
  config_detail::Reader top(doc, "config");
  const auto named = top.string("subcommand", subcommand);
  if (named != subcommand)
    fail("config.subcommand is '" + named + "' but the command line asks for '" + subcommand + "'");
  cfg.seed = static_cast<std::uint64_t>(top.integer("seed", static_cast<std::int64_t>(cfg.seed)));
  cfg.out = top.string("out", "");
  cfg.parallel = top.has("parallel") && [&] {
    if (!doc.at("parallel").is_boolean()) fail("config.parallel must be a boolean");
    return doc.at("parallel").get<bool>();
  }();

  const bool all = subcommand == "all";
  if (all) {
    top.forbid("params", "the acceptance campaign fixes its own parameters");
  } else if (auto pr = top.object("params")) {
    cfg.params = config_detail::parse_params(*pr, subcommand);
  }

  auto allowed = [&](const std::string& block) {
    if (all || block == subcommand) return true;
    top.forbid(block, "only used by the " + block + " campaign");
    return false;
  };

  if (allowed("roots")) {
    if (auto r = top.object("roots")) {
      cfg.roots.trials = r->count("trials", cfg.roots.trials, 1);
      cfg.roots.hardy_trials = r->count("hardy_trials", cfg.roots.hardy_trials, 1);
      cfg.roots.perturbation = r->number("perturbation", cfg.roots.perturbation);
      config_detail::positive(cfg.roots.perturbation, r->where("perturbation"));
      r->finish();
    }
  }
  if (allowed("shoot")) {
    if (auto r = top.object("shoot")) {
      auto& s = cfg.shoot;
      s.r0 = r->number("r0", s.r0);
      s.r_max = r->number("r_max", s.r_max);
      s.samples = r->count("samples", s.samples, 16);
      const auto w = r->numbers("window2", {s.window2[0], s.window2[1]}, 2);
      if (w.size() != 2 || !(w[0] > 0.0 && w[0] < w[1] && w[1] <= 1.0))
        fail(r->where("window2") + " must be [lo, hi] with 0 < lo < hi <= 1");
      s.window2 = {w[0], w[1]};
      s.riccati_p = r->numbers("riccati_p", s.riccati_p);
      s.riccati_lambda = r->numbers("riccati_lambda", s.riccati_lambda);
      s.riccati_T = r->number("riccati_T", s.riccati_T);
      config_detail::positive(s.r0, r->where("r0"));
      if (!(s.r_max >= 10.0 * s.r0)) fail(r->where("r_max") + " must be at least 10 r0");
      config_detail::positive(s.riccati_T, r->where("riccati_T"));
      for (double p : s.riccati_p)
        if (!(p > 1.0)) fail(r->where("riccati_p") + " entries must exceed 1");
      for (double l : s.riccati_lambda) config_detail::positive(l, r->where("riccati_lambda") + " entries");
      r->finish();
    }
  }
  if (allowed("blowup")) {
    if (auto r = top.object("blowup")) {
      auto& b = cfg.blowup;
      b.radii = r->numbers("radii", b.radii, 2);
      b.shifts = r->numbers("shifts", b.shifts, 2);
      b.origin_window = r->number("origin_window", b.origin_window);
      b.translation_window = r->number("translation_window", b.translation_window);
      b.window_samples = r->count("window_samples", b.window_samples, 2);
      for (double x : b.radii) config_detail::positive(x, r->where("radii") + " entries");
      for (double x : b.shifts) config_detail::positive(x, r->where("shifts") + " entries");
      if (!(b.origin_window >= 1.0)) fail(r->where("origin_window") + " must be >= 1");
      if (!(b.translation_window >= 0.0)) fail(r->where("translation_window") + " must be >= 0");
      for (double t : b.shifts)
        if (!(t > b.translation_window)) fail(r->where("shifts") + " entries must exceed translation_window");
      r->finish();
    }
  }
  if (allowed("martin")) {
    if (auto r = top.object("martin")) {
      auto& m = cfg.martin;
      m.t = r->number("t", m.t);
      m.x = r->numbers("x", m.x);
      m.xi = r->numbers("xi", m.xi);
      m.samples = r->count("samples", m.samples, 16);
      if (m.x.size() != m.xi.size()) fail(r->where("x") + " and xi must have the same dimension");
      double nxi = 0.0;
      for (double c : m.xi) nxi += c * c;
      if (std::abs(std::sqrt(nxi) - 1.0) > 1e-12) fail(r->where("xi") + " must be a unit vector");
      double nx = 0.0;
      for (double c : m.x) nx += c * c;
      if (!(m.t > std::sqrt(nx) + 1.0)) fail(r->where("t") + " must exceed |x| + 1");
      r->finish();
    }
  }
  if (allowed("grid")) {
    if (auto r = top.object("grid")) {
      auto& g = cfg.grid;
      g.h = r->numbers("h", g.h, 2);
      const auto xi = r->numbers("xi", {g.xi[0], g.xi[1]}, 2);
      if (xi.size() != 2) fail(r->where("xi") + " must have two components");
      g.xi = {xi[0], xi[1]};
      const auto rect = r->numbers("rect", {g.rect.x0, g.rect.y0, g.rect.x1, g.rect.y1}, 4);
      if (rect.size() != 4 || !(rect[2] > rect[0] && rect[3] > rect[1]))
        fail(r->where("rect") + " must be [x0, y0, x1, y1] with x1 > x0 and y1 > y0");
      g.rect = {rect[0], rect[1], rect[2], rect[3]};
      g.tol = r->number("tol", g.tol);
      g.max_iters = static_cast<int>(r->count("max_iters", static_cast<std::size_t>(g.max_iters), 1));
      for (double h : g.h) config_detail::positive(h, r->where("h") + " entries");
      for (std::size_t k = 1; k < g.h.size(); ++k)
        if (!(g.h[k] < g.h[k - 1])) fail(r->where("h") + " must be strictly decreasing");
      config_detail::positive(g.tol, r->where("tol"));
      if (std::abs(std::hypot(g.xi[0], g.xi[1]) - 1.0) > 1e-12) fail(r->where("xi") + " must be a unit vector");
      r->finish();
    }
  }
  if (allowed("bochner")) {
    if (auto r = top.object("bochner")) {
      auto& b = cfg.bochner;
      b.h = r->numbers("h", b.h, 2);
      b.exact_h = r->number("exact_h", b.exact_h);
      for (double h : b.h) config_detail::positive(h, r->where("h") + " entries");
      for (std::size_t k = 1; k < b.h.size(); ++k)
        if (!(b.h[k] < b.h[k - 1])) fail(r->where("h") + " must be strictly decreasing");
      config_detail::positive(b.exact_h, r->where("exact_h"));
      r->finish();
    }
  }
  top.finish();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in.good()) config_detail::fail("cannot read config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    config_detail::fail("config " + path + " is not valid JSON: " + e.what());
  }
  return parse(doc, subcommand);
}

}  // namespace plap
