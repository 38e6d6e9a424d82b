#include "toeplab/experiments.hpp"

#include "toeplab/errors.hpp"
#include "toeplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace toeplab {

namespace {

// Reads parameters one key at a time, records the resolved value (default or
// given) and collects every schema violation instead of stopping at the first.
class Params {
 public:
  Params(const Json& raw, std::vector<std::string>& errors) : raw_(raw), errors_(errors) {
    if (!raw_.is_null() && !raw_.is_object()) error("", "expected an object");
  }

  Json resolved = Json::object();

  bool has(const char* key) const { return raw_.is_object() && raw_.contains(key); }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back("parameters" + (key.empty() ? "" : "." + key) + ": " + msg);
    failed_ = true;
  }
  bool failed() const { return failed_; }

  std::int64_t integer(const char* key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    std::int64_t v = def;
    if (const Json* j = take(key)) {
      if (!j->is_number_integer())
        error(key, "expected an integer");
      else if (j->is_number_unsigned() && j->get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
        error(key, "must be <= " + std::to_string(hi));
      else if (v = j->get<std::int64_t>(); v < lo || v > hi)
        error(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    resolved[key] = v;
    return v;
  }

  std::uint64_t seed(std::optional<std::uint64_t> override_seed) {
    std::uint64_t v = 1;
    if (const Json* j = take("seed")) {
      if (!j->is_number_unsigned() && !(j->is_number_integer() && j->get<std::int64_t>() >= 0))
        error("seed", "expected a non-negative integer");
      else
        v = j->get<std::uint64_t>();
    }
    if (override_seed) v = *override_seed;
    resolved["seed"] = v;
    return v;
  }

  double number(const char* key, double def, double lo, double hi) {
    double v = def;
    if (const Json* j = take(key)) {
      if (!j->is_number())
        error(key, "expected a number");
      else if (v = j->get<double>(); !(v >= lo && v <= hi))
        error(key, "must be in [" + format_double(lo) + ", " + format_double(hi) + "]");
    }
    resolved[key] = v;
    return v;
  }

  bool boolean(const char* key, bool def) {
    bool v = def;
    if (const Json* j = take(key)) {
      if (!j->is_boolean())
        error(key, "expected true or false");
      else
        v = j->get<bool>();
    }
    resolved[key] = v;
    return v;
  }

  std::string choice(const char* key, const std::string& def, std::initializer_list<const char*> options) {
    std::string v = def;
    if (const Json* j = take(key)) {
      bool ok = j->is_string();
      if (ok) {
        v = j->get<std::string>();
        ok = std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
      }
      if (!ok) {
        std::string list;
        for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
        error(key, "expected one of: " + list);
        v = def;
      }
    }
    resolved[key] = v;
    return v;
  }

  std::string text(const char* key, const std::string& def) {
    std::string v = def;
    if (const Json* j = take(key)) {
      if (!j->is_string())
        error(key, "expected a string");
      else
        v = j->get<std::string>();
    }
    resolved[key] = v;
    return v;
  }

  /// Array of positive integers or {"from", "to", "step"}; sorted, distinct.
  std::vector<std::int64_t> k_list(const char* key, std::vector<std::int64_t> def) {
    std::vector<std::int64_t> v = std::move(def);
    if (const Json* j = take(key)) {
      std::vector<std::int64_t> parsed;
      bool ok = true;
      if (j->is_object()) {
        for (auto it = j->begin(); it != j->end(); ++it)
          if (it.key() != "from" && it.key() != "to" && it.key() != "step") {
            error(std::string(key) + "." + it.key(), "unknown field");
            ok = false;
          }
        auto field = [&](const char* name, std::int64_t fallback, bool needed) -> std::int64_t {
          if (!j->contains(name)) {
            if (needed) {
              error(std::string(key) + "." + name, "missing required field");
              ok = false;
            }
            return fallback;
          }
          const Json& f = j->at(name);
          if (!f.is_number_integer() || f.get<std::int64_t>() < 1 || f.get<std::int64_t>() > kMaxK) {
            error(std::string(key) + "." + name, "expected an integer in [1, " + std::to_string(kMaxK) + "]");
            ok = false;
            return fallback;
          }
          return f.get<std::int64_t>();
        };
        const auto from = field("from", 1, true);
        const auto to = field("to", 1, true);
        const auto step = field("step", 1, false);
        if (ok && to < from) {
          error(key, "'to' must be >= 'from'");
          ok = false;
        }
        if (ok)
          for (std::int64_t k = from; k <= to; k += step) parsed.push_back(k);
      } else if (j->is_array()) {
        for (std::size_t i = 0; i < j->size(); ++i) {
          const Json& e = (*j)[i];
          if (!e.is_number_integer() || e.get<std::int64_t>() < 1 || e.get<std::int64_t>() > kMaxK) {
            error(std::string(key) + "[" + std::to_string(i) + "]",
                  "expected an integer in [1, " + std::to_string(kMaxK) + "]");
            ok = false;
          } else {
            parsed.push_back(e.get<std::int64_t>());
          }
        }
      } else {
        error(key, "expected an array of integers or {\"from\", \"to\", \"step\"}");
        ok = false;
      }
      if (ok && parsed.empty()) {
        error(key, "must not be empty");
        ok = false;
      }
      if (ok) {
        std::sort(parsed.begin(), parsed.end());
        if (std::adjacent_find(parsed.begin(), parsed.end()) != parsed.end()) {
          error(key, "duplicate k values");
          ok = false;
        }
      }
      if (ok) v = std::move(parsed);
    }
    resolved[key] = v;
    return v;
  }

  /// Polynomial coefficients a_0..a_p of f.
  std::vector<double> polynomial(const char* key, std::vector<double> def) {
    std::vector<double> v = std::move(def);
    if (const Json* j = take(key)) {
      std::vector<double> parsed;
      bool ok = j->is_array() && !j->empty() && j->size() <= kDefaultDegreeCap + 1;
      if (!ok) error(key, "expected 1 to " + std::to_string(kDefaultDegreeCap + 1) + " polynomial coefficients");
      for (std::size_t i = 0; ok && i < j->size(); ++i) {
        if (!(*j)[i].is_number() || !std::isfinite((*j)[i].get<double>())) {
          error(std::string(key) + "[" + std::to_string(i) + "]", "expected a finite number");
          ok = false;
        } else {
          parsed.push_back((*j)[i].get<double>());
        }
      }
      if (ok) v = std::move(parsed);
    }
    resolved[key] = v;
    return v;
  }

  std::optional<SubtorusData> subtorus(const char* key) {
    const Json* j = take(key);
    if (!j) return std::nullopt;
    try {
      auto sub = subtorus_from_json(*j, std::string("parameters.") + key);
      fiber_vertices(sub);
      resolved[key] = to_json(sub);
      return sub;
    } catch (const ValidationError& e) {
      errors_.push_back(e.what());
      failed_ = true;
      return std::nullopt;
    }
  }

  /// {"kind": "invariant" | "poly", "terms": [...]}; kind defaults to invariant.
  struct SymbolSpec {
    bool invariant = true;
    std::optional<InvariantSymbol> inv;
    std::optional<SymbolPoly> poly;
  };

  std::optional<SymbolSpec> symbol(const char* key, std::size_t n, bool allow_poly, const Json& def) {
    const Json* j = take(key);
    const Json& src = j ? *j : def;
    const std::string path = std::string("parameters.") + key;
    if (!src.is_object()) {
      error(key, "expected an object with \"terms\"");
      return std::nullopt;
    }
    Json body = src;
    std::string kind = "invariant";
    if (body.contains("kind")) {
      if (!body["kind"].is_string() || (body["kind"] != "invariant" && body["kind"] != "poly")) {
        error(std::string(key) + ".kind", "expected \"invariant\" or \"poly\"");
        return std::nullopt;
      }
      kind = body["kind"].get<std::string>();
      body.erase("kind");
    }
    if (kind == "poly" && !allow_poly) {
      error(std::string(key) + ".kind", "this experiment needs an invariant symbol");
      return std::nullopt;
    }
    try {
      SymbolSpec spec;
      if (kind == "invariant") {
        spec.inv = invariant_symbol_from_json(body, n, path);
        resolved[key] = Json{{"kind", "invariant"}, {"terms", to_json(*spec.inv)["terms"]}};
      } else {
        spec.invariant = false;
        spec.poly = symbol_poly_from_json(body, n, path);
        resolved[key] = Json{{"kind", "poly"}, {"terms", to_json(*spec.poly)["terms"]}};
      }
      return spec;
    } catch (const ValidationError& e) {
      errors_.push_back(e.what());
      failed_ = true;
      return std::nullopt;
    }
  }

  /// Raw access for structured parameters handled by the caller.
  const Json* raw(const char* key) { return take(key); }

  void reject_unknown() {
    if (!raw_.is_object()) return;
    for (auto it = raw_.begin(); it != raw_.end(); ++it)
      if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) error(it.key(), "unknown parameter");
  }

  static constexpr std::int64_t kMaxK = 100000;

 private:
  const Json* take(const char* key) {
    used_.emplace_back(key);
    if (!raw_.is_object() || !raw_.contains(key)) return nullptr;
    return &raw_.at(key);
  }

  const Json& raw_;
  std::vector<std::string>& errors_;
  std::vector<std::string> used_;
  bool failed_ = false;
};

Json invariant_json(std::size_t n, std::vector<std::pair<std::vector<std::int64_t>, std::string>> terms) {
  Json out{{"kind", "invariant"}, {"terms", Json::array()}};
  for (auto& [gamma, coeff] : terms) {
    gamma.resize(n, 0);
    out["terms"].push_back({{"gamma", gamma}, {"coeff", coeff}});
  }
  return out;
}

Json a_power(std::size_t n, std::size_t j, std::int64_t p) {
  std::vector<std::int64_t> gamma(n, 0);
  if (j < n) gamma[j] = p;
  return invariant_json(n, {{gamma, "1"}});
}

SubtorusData cp1_cp1() { return SubtorusData{4, 2, IntMatrix{{1, 1, 0, 0}, {0, 0, 1, 1}}, {1, 1}}; }

void check_fit_window(Params& p, const std::vector<std::int64_t>& ks, std::int64_t order) {
  if (static_cast<std::int64_t>(ks.size()) < order + 2)
    p.error("order", "needs at least order+2 = " + std::to_string(order + 2) + " k values");
  if (!ks.empty() && ks.front() < 2 * order)
    p.error("k_list", "smallest k must be >= 2*order = " + std::to_string(2 * order));
}

Json resolve_theorem1(Params& p, const RunSettings& s) {
  const auto n = p.integer("n", 2, 1, 8);
  std::vector<std::int64_t> default_ks;
  for (std::int64_t k = 10; k <= 60; ++k) default_ks.push_back(k);
  const auto ks = p.k_list("k_list", default_ks);
  p.symbol("symbol", static_cast<std::size_t>(n), true, a_power(static_cast<std::size_t>(n), 0, 1));
  p.polynomial("f", {0.0, 1.0});
  p.text("f_id", "f");
  const auto order = p.integer("order", 2, 0, 6);
  check_fit_window(p, ks, order);
  p.choice("path", "eigen", {"eigen", "poly"});
  p.integer("mesh", 64, kMinSimplexMesh, 4096);
  p.integer("samples", 1000000, static_cast<std::int64_t>(kMinMcSamples), 10000000000LL);
  p.seed(s.seed);
  return p.resolved;
}

Json resolve_theorem2(Params& p, const RunSettings& s) {
  const bool custom = p.has("subtorus");
  auto sub = custom ? p.subtorus("subtorus") : std::optional<SubtorusData>(cp1_cp1());
  if (!custom) p.resolved["subtorus"] = to_json(*sub);
  const std::size_t n = sub ? sub->n : 1;
  Json def_symbol = custom ? a_power(n, 0, 1) : invariant_json(4, {{{1, 0, 0, 0}, "1"}, {{0, 0, 1, 0}, "1"}});
  if (sub) p.symbol("symbol", n, false, def_symbol);
  p.polynomial("f", {0.0, 1.0});
  p.text("f_id", "f");
  std::vector<std::int64_t> default_ks;
  std::int64_t period = 1;
  if (sub) {
    Integer q = 1;
    for (const auto& v : fiber_vertices(*sub)) q = boost::multiprecision::lcm(q, lcm_of_denominators(v.point));
    period = q.convert_to<std::int64_t>();
  }
  for (std::int64_t k = period * ((10 + period - 1) / period); k <= std::max<std::int64_t>(40, 10 * period);
       k += period)
    default_ks.push_back(k);
  const auto ks = p.k_list("k_list", default_ks);
  const auto order = p.integer("order", 2, 0, 6);
  check_fit_window(p, ks, order);
  p.integer("samples", 200000, 2, 10000000000LL);
  p.seed(s.seed);
  return p.resolved;
}

std::vector<std::string> default_inverse_grid() {
  return {"1/5", "1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "4/5"};
}

Json resolve_inverse(Params& p, const RunSettings&) {
  const bool custom = p.has("subtorus");
  std::int64_t n = 2;
  std::optional<SubtorusData> sub;
  if (custom) {
    sub = p.subtorus("subtorus");
    if (p.has("n")) p.error("n", "give either n or subtorus, not both");
    p.raw("n");
  } else {
    n = p.integer("n", 2, 1, 8);
    sub = SubtorusData::diagonal_circle(static_cast<std::size_t>(n));
    p.resolved.erase("n");
    p.resolved["subtorus"] = to_json(*sub);
  }
  if (sub) p.symbol("symbol", sub->n, false, a_power(sub->n, 0, 2));

  const Json* grid = p.raw("grid");
  Json resolved_grid = Json::array();
  if (grid) {
    if (!grid->is_array() || grid->empty()) {
      p.error("grid", "expected a non-empty array of points");
    } else if (sub) {
      for (std::size_t g = 0; g < grid->size(); ++g) {
        const std::string key = "grid[" + std::to_string(g) + "]";
        const Json& pt = (*grid)[g];
        if (!pt.is_array() || pt.size() != sub->n) {
          p.error(key, "expected " + std::to_string(sub->n) + " rational coordinates");
          continue;
        }
        Json coords = Json::array();
        try {
          for (std::size_t i = 0; i < pt.size(); ++i)
            coords.push_back(to_string(rational_from_json(pt[i], "parameters." + key + "[" + std::to_string(i) + "]")));
          resolved_grid.push_back(coords);
        } catch (const ValidationError& e) {
          p.error(key, e.what());
        }
      }
    }
  } else if (!custom && n == 2) {
    for (const auto& a : default_inverse_grid()) {
      const Rational x = parse_rational(a);
      resolved_grid.push_back(Json::array({to_string(x), to_string(Rational(1 - x))}));
    }
  } else {
    p.error("grid", "required unless the default n = 2 diagonal circle is used");
  }
  p.resolved["grid"] = resolved_grid;
  const auto k_max = p.k_list("k_max", {16, 32, 64});
  const auto order = p.integer("order", 1, 1, kMaxExtrapolationOrder);
  if (!k_max.empty() && k_max.front() < order + 2) p.error("k_max", "smallest k_max must be >= order+2");
  p.choice("method", "richardson", {"richardson", "rational"});
  return p.resolved;
}

Json resolve_model(Params& p, const RunSettings&) {
  p.integer("k", 1, 1, 3);
  const auto l = p.integer("l", 1, 1, 3);
  const Json* indices = p.raw("indices");
  const Json* box = p.raw("box");
  Json resolved = Json::array();
  if (indices && box) p.error("box", "give either indices or box, not both");
  if (indices) {
    if (!indices->is_array()) {
      p.error("indices", "expected an array");
    } else {
      for (std::size_t i = 0; i < indices->size(); ++i) {
        const Json& e = (*indices)[i];
        std::vector<std::int64_t> m;
        if (l == 1 && e.is_number_integer()) {
          m.push_back(e.get<std::int64_t>());
        } else if (e.is_array() && static_cast<std::int64_t>(e.size()) == l &&
                   std::all_of(e.begin(), e.end(), [](const Json& v) { return v.is_number_integer(); })) {
          for (const auto& v : e) m.push_back(v.get<std::int64_t>());
        } else {
          p.error("indices[" + std::to_string(i) + "]", "expected " + std::to_string(l) + " integers");
          continue;
        }
        if (std::all_of(m.begin(), m.end(), [](auto v) { return v == 0; }))
          p.error("indices[" + std::to_string(i) + "]", "m = 0 is excluded");
        resolved.push_back(m);
      }
      for (std::size_t i = 0; i < resolved.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
          if (resolved[i] == resolved[j]) p.error("indices[" + std::to_string(i) + "]", "duplicate index");
    }
  } else {
    std::int64_t M = l == 1 ? 0 : 2;
    if (box) {
      if (!box->is_number_integer() || box->get<std::int64_t>() < 1 || box->get<std::int64_t>() > 20)
        p.error("box", "expected an integer in [1, 20]");
      else
        M = box->get<std::int64_t>();
    }
    if (M == 0) {
      for (std::int64_t m = 1; m <= 5; ++m) resolved.push_back(std::vector<std::int64_t>{m});
    } else {
      for (const auto& idx : truncation_box(static_cast<std::size_t>(l), 1, M)) resolved.push_back(idx.m);
    }
  }
  p.resolved["indices"] = resolved;
  p.integer("hermite_nodes", 64, 1, 400);
  p.integer("fourier_nodes", l == 1 ? 24 : 12, 1, 400);
  p.number("tolerance", 1e-8, 0.0, 1.0);
  p.boolean("normalized", true);
  p.number("step", 1e-3, 1e-8, 0.1);
  p.choice("scheme", "central4", {"central2", "central4"});
  p.number("residual_tolerance", 1e-6, 0.0, 1.0);
  return p.resolved;
}

Json resolve_distinguish(Params& p, const RunSettings&) {
  const bool custom = p.has("subtorus");
  std::optional<SubtorusData> sub;
  if (custom) {
    sub = p.subtorus("subtorus");
    if (p.has("n")) p.error("n", "give either n or subtorus, not both");
    p.raw("n");
  } else {
    const auto n = p.integer("n", 2, 2, 8);
    sub = SubtorusData::diagonal_circle(static_cast<std::size_t>(n));
    p.resolved.erase("n");
    p.resolved["subtorus"] = to_json(*sub);
  }
  if (sub) {
    p.symbol("symbol_a", sub->n, false, a_power(sub->n, 0, 1));
    p.symbol("symbol_b", sub->n, false, a_power(sub->n, 1, 1));
  }
  p.integer("k_max", 10, 1, 1000);
  return p.resolved;
}

void write_file(const std::string& path, const std::string& content, std::vector<std::string>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cli::run: cannot open output file " + path);
  out << content;
  if (!out) throw ValidationError("cli::run: failed writing " + path);
  files.push_back(path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Context {
  Json params;
  std::string prefix;
  unsigned threads = 1;
  std::vector<std::string> files;
};

InvariantSymbol invariant_of(const Json& j, std::size_t n) {
  Json body = j;
  body.erase("kind");
  return invariant_symbol_from_json(body, n);
}

TestFunction test_function_of(const Json& j) { return TestFunction::polynomial(j.get<std::vector<double>>()); }

std::vector<std::int64_t> ints_of(const Json& j) { return j.get<std::vector<std::int64_t>>(); }

int run_theorem1(Context& ctx, Json& summary) {
  const auto& p = ctx.params;
  const auto n = p["n"].get<std::size_t>();
  const int m = static_cast<int>(n) - 1;
  const auto ks = ints_of(p["k_list"]);
  const TestFunction f = test_function_of(p["f"]);
  const bool invariant = p["symbol"]["kind"] == "invariant";
  SymbolPoly poly;
  std::optional<InvariantSymbol> inv;
  if (invariant) {
    inv = invariant_of(p["symbol"], n);
    poly = inv->to_symbol_poly();
  } else {
    Json body = p["symbol"];
    body.erase("kind");
    poly = symbol_poly_from_json(body, n);
  }

  double c0 = 0.0;
  double c0_stderr = 0.0;
  std::string c0_method;
  if (invariant) {
    c0 = c0_simplex_quad(*inv, f, n, p["mesh"].get<int>(), ctx.threads);
    c0_method = "simplex_quad";
  } else {
    McOptions opts;
    opts.threads = ctx.threads;
    const auto mc = c0_sphere_mc(poly, f, n, p["samples"].get<std::uint64_t>(), p["seed"].get<std::uint64_t>(), opts);
    c0 = mc.estimate;
    c0_stderr = mc.standard_error;
    c0_method = "sphere_mc";
  }
  const double sigma = full_sphere_volume(n);

  const bool eigen_path = p["path"] == "eigen";
  std::vector<double> mu(ks.size()), dims(ks.size());
  parallel_for(ks.size(), ctx.threads, [&](std::size_t i) {
    const auto block = assemble_block(poly, n, ks[i]);
    mu[i] = eigen_path ? measure_eigen(block, f) : measure_poly(block, f);
    dims[i] = static_cast<double>(block.dim());
  });

  std::ostringstream csv;
  csv << "n,k,m,f_id,mu,scaled_mu,dim,ratio,ratio_to_c0\n";
  std::vector<Sample> samples;
  double worst_ratio_dev_times_k = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double scaled = scaled_measure(mu[i], m, ks[i]);
    samples.push_back({ks[i], scaled});
    const double ratio = mu[i] / dims[i];
    worst_ratio_dev_times_k =
        std::max(worst_ratio_dev_times_k, std::abs(ratio - c0 / sigma) * static_cast<double>(ks[i]));
    csv << n << ',' << ks[i] << ',' << m << ',' << p["f_id"].get<std::string>() << ',' << format_double(mu[i]) << ','
        << format_double(scaled) << ',' << format_double(dims[i]) << ',' << format_double(ratio) << ','
        << format_double(c0 == 0.0 ? std::numeric_limits<double>::quiet_NaN() : scaled / c0) << '\n';
  }
  write_file(ctx.prefix + ".csv", csv.str(), ctx.files);

  const Json fit = to_json(fit_expansion(samples, p["order"].get<int>()));
  const double c0_fit = fit["c"][0].get<double>();
  summary = Json{{"experiment", "theorem1"},
                 {"fit", fit},
                 {"c0_reference", c0},
                 {"c0_reference_method", c0_method},
                 {"c0_reference_stderr", c0_stderr},
                 {"sigma_volume", sigma},
                 {"c0_relative_error", c0 == 0.0 ? Json(nullptr) : Json(std::abs(c0_fit - c0) / std::abs(c0))},
                 {"max_k_times_ratio_deviation", worst_ratio_dev_times_k}};
  write_file(ctx.prefix + ".json", dump(summary), ctx.files);
  return kExitOk;
}

int run_theorem2(Context& ctx, Json& summary) {
  const auto& p = ctx.params;
  const auto sub = subtorus_from_json(p["subtorus"]);
  const auto symbol = invariant_of(p["symbol"], sub.n);
  const TestFunction f = test_function_of(p["f"]);
  const auto ks = ints_of(p["k_list"]);
  const int m = static_cast<int>(sub.n - sub.d);

  const auto check = regular_free_check(sub);
  std::vector<double> mu(ks.size());
  std::vector<std::size_t> counts(ks.size());
  parallel_for(ks.size(), ctx.threads, [&](std::size_t i) {
    const auto spec = equivariant_spectrum(sub, ks[i], symbol);
    counts[i] = spec.entries.size();
    mu[i] = fiber_measure(spec, f);
  });
  std::ostringstream csv;
  csv << "k,count,f_id,mu,scaled_mu\n";
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double scaled = scaled_measure(mu[i], m, ks[i]);
    samples.push_back({ks[i], scaled});
    csv << ks[i] << ',' << counts[i] << ',' << p["f_id"].get<std::string>() << ',' << format_double(mu[i]) << ','
        << format_double(scaled) << '\n';
  }
  write_file(ctx.prefix + ".csv", csv.str(), ctx.files);

  summary = Json{{"experiment", "theorem2"}, {"m", m}, {"regular_free", to_json(check)}};
  summary["fit"] = to_json(fit_expansion(samples, p["order"].get<int>()));
  const auto leading = theorem2_leading(sub, symbol, f, p["samples"].get<std::uint64_t>(),
                                        p["seed"].get<std::uint64_t>(), ctx.threads);
  summary["leading"] = Json{{"value", leading.value},
                            {"stderr", leading.standard_error},
                            {"volume", leading.volume},
                            {"acceptance_rate", leading.acceptance_rate},
                            {"samples", leading.samples}};
  const double last = samples.back().value;
  summary["deviation_at_k_max"] = std::abs(last - leading.value);
  summary["k_max"] = ks.back();
  write_file(ctx.prefix + ".json", dump(summary), ctx.files);
  return kExitOk;
}

int run_inverse(Context& ctx, Json& summary) {
  const auto& p = ctx.params;
  const auto sub = subtorus_from_json(p["subtorus"]);
  const auto symbol = invariant_of(p["symbol"], sub.n);
  std::vector<RationalVector> grid;
  for (const auto& pt : p["grid"]) {
    RationalVector x;
    for (const auto& c : pt) x.push_back(parse_rational(c.get<std::string>()));
    grid.push_back(std::move(x));
  }
  const auto k_maxes = ints_of(p["k_max"]);
  const int order = p["order"].get<int>();
  const auto method = p["method"] == "rational" ? ExtrapolationMethod::Rational : ExtrapolationMethod::Richardson;
  const auto oracle = invariant_oracle(sub, symbol);

  std::ostringstream csv;
  bool header = true;
  std::vector<double> raw_err, ext_err, xs;
  std::size_t missing = 0;
  bool low_confidence = false;
  for (auto k_max : k_maxes) {
    ReconstructOptions raw_opts{0, method, symbol, ctx.threads};
    ReconstructOptions ext_opts{order, method, symbol, ctx.threads};
    const auto raw = reconstruct(sub, oracle, k_max, grid, raw_opts);
    const auto ext = reconstruct(sub, oracle, k_max, grid, ext_opts);
    write_reconstruction_csv(csv, raw, sub.n, header);
    header = false;
    write_reconstruction_csv(csv, ext, sub.n, false);
    raw_err.push_back(raw.max_error());
    ext_err.push_back(ext.max_error());
    xs.push_back(static_cast<double>(k_max));
    missing += ext.missing_count();
    for (const auto& pt : ext.points) low_confidence = low_confidence || pt.low_confidence;
  }
  write_file(ctx.prefix + ".csv", csv.str(), ctx.files);

  auto slope = [&](const std::vector<double>& err) -> Json {
    if (xs.size() < 2 || std::any_of(err.begin(), err.end(), [](double e) { return !(e > 0.0); })) return nullptr;
    return log_log_slope(xs, err);
  };
  summary = Json{{"experiment", "inverse"},
                 {"k_max", k_maxes},
                 {"order", order},
                 {"method", p["method"]},
                 {"max_error_raw", raw_err},
                 {"max_error_extrapolated", ext_err},
                 {"slope_raw", slope(raw_err)},
                 {"slope_extrapolated", slope(ext_err)},
                 {"missing_points", missing},
                 {"low_confidence", low_confidence}};
  write_file(ctx.prefix + ".json", dump(summary), ctx.files);
  return kExitOk;
}

int run_model(Context& ctx, Json& summary) {
  const auto& p = ctx.params;
  const auto k_dim = p["k"].get<std::size_t>();
  std::vector<ModelIndex> indices;
  for (const auto& m : p["indices"]) indices.push_back({m.get<std::vector<std::int64_t>>(), k_dim});
  QuadratureSpec quad{p["hermite_nodes"].get<std::size_t>(), p["fourier_nodes"].get<std::size_t>()};
  const bool normalized = p["normalized"].get<bool>();
  const auto report = check_isometry(indices, quad, p["tolerance"].get<double>(), normalized);
  const auto gram = gram_matrix(indices, quad, normalized);

  std::ostringstream csv;
  csv << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < gram.gram.rows(); ++r)
    for (Eigen::Index c = 0; c < gram.gram.cols(); ++c)
      csv << r << ',' << c << ',' << format_double(gram.gram(r, c).real()) << ','
          << format_double(gram.gram(r, c).imag()) << '\n';
  write_file(ctx.prefix + ".csv", csv.str(), ctx.files);

  const auto scheme = p["scheme"] == "central2" ? DifferenceScheme::Central2 : DifferenceScheme::Central4;
  const double step = p["step"].get<double>();
  double residual = 0.0;
  const std::vector<double> probes = {-1.5, -0.5, 0.5, 1.5};
  for (const auto& idx : indices) {
    std::vector<double> theta(idx.m.size());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = 0.3 * static_cast<double>(i + 1);
    std::size_t total = 1;
    for (std::size_t i = 0; i < k_dim; ++i) total *= probes.size();
    std::vector<double> y(k_dim);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rest = t;
      for (std::size_t i = 0; i < k_dim; ++i) {
        y[i] = probes[rest % probes.size()];
        rest /= probes.size();
      }
      residual = std::max(residual, annihilation_residual(idx, y, theta, step, scheme));
    }
  }
  const bool annihilation_pass = residual < p["residual_tolerance"].get<double>();
  summary = to_json(report);
  summary["experiment"] = "model";
  summary["annihilation"] = Json{{"max_residual", residual},
                                 {"step", step},
                                 {"scheme", p["scheme"]},
                                 {"tolerance", p["residual_tolerance"]},
                                 {"pass", annihilation_pass}};
  summary["pass"] = report.pass && annihilation_pass;
  write_file(ctx.prefix + ".json", dump(summary), ctx.files);
  return summary["pass"].get<bool>() ? kExitOk : kExitNumerical;
}

int run_distinguish(Context& ctx, Json& summary) {
  const auto& p = ctx.params;
  const auto sub = subtorus_from_json(p["subtorus"]);
  const auto a = invariant_of(p["symbol_a"], sub.n);
  const auto b = invariant_of(p["symbol_b"], sub.n);
  const auto report = spectral_distinguishability(a, b, sub, p["k_max"].get<std::int64_t>());
  std::ostringstream csv;
  csv << "k,labeled_max_diff,multiset_max_diff\n";
  for (std::size_t i = 0; i < report.labeled_max_diff.size(); ++i)
    csv << i + 1 << ',' << format_double(report.labeled_max_diff[i]) << ','
        << format_double(report.multiset_max_diff[i]) << '\n';
  write_file(ctx.prefix + ".csv", csv.str(), ctx.files);
  summary = to_json(report);
  summary["experiment"] = "distinguish";
  write_file(ctx.prefix + ".json", dump(summary), ctx.files);
  return kExitOk;
}

}  // namespace

Json resolve_manifest(const Json& manifest, const RunSettings& settings) {
  std::vector<std::string> errors;
  if (!manifest.is_object()) throw ValidationError("cli::run: manifest must be a JSON object");
  for (auto it = manifest.begin(); it != manifest.end(); ++it)
    if (it.key() != "experiment" && it.key() != "parameters" && it.key() != "output")
      errors.push_back(it.key() + ": unknown field");

  std::string name;
  if (!manifest.contains("experiment") || !manifest["experiment"].is_string()) {
    errors.push_back("experiment: missing or not a string");
  } else {
    name = manifest["experiment"].get<std::string>();
    if (std::find(kExperimentNames.begin(), kExperimentNames.end(), name) == kExperimentNames.end())
      errors.push_back("experiment: unknown experiment '" + name +
                       "' (expected theorem1, theorem2, inverse, model or distinguish)");
  }
  std::string output = settings.out_prefix;
  if (manifest.contains("output")) {
    if (!manifest["output"].is_string() || manifest["output"].get<std::string>().empty())
      errors.push_back("output: expected a non-empty path prefix");
    else if (output.empty())
      output = manifest["output"].get<std::string>();
  }
  if (output.empty()) output = "toeplab_" + (name.empty() ? std::string("run") : name);

  const Json empty = Json::object();
  const Json& raw = manifest.contains("parameters") ? manifest["parameters"] : empty;
  Params params(raw, errors);
  Json resolved;
  if (name == "theorem1") resolved = resolve_theorem1(params, settings);
  if (name == "theorem2") resolved = resolve_theorem2(params, settings);
  if (name == "inverse") resolved = resolve_inverse(params, settings);
  if (name == "model") resolved = resolve_model(params, settings);
  if (name == "distinguish") resolved = resolve_distinguish(params, settings);
  if (!name.empty() && std::find(kExperimentNames.begin(), kExperimentNames.end(), name) != kExperimentNames.end())
    params.reject_unknown();

  if (!errors.empty()) {
    std::string msg = "cli::run: invalid manifest";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  return Json{{"experiment", name}, {"parameters", resolved}, {"output", output}};
}

RunResult run_experiment(const Json& manifest, const RunSettings& settings) {
  const Json resolved = resolve_manifest(manifest, settings);
  Context ctx;
  ctx.params = resolved["parameters"];
  ctx.prefix = resolved["output"].get<std::string>();
  ctx.threads = std::max(1u, settings.threads);

  Json sidecar = resolved;
  sidecar["threads"] = ctx.threads;
  write_file(ctx.prefix + ".manifest.json", dump(sidecar), ctx.files);

  RunResult result;
  const std::string name = resolved["experiment"].get<std::string>();
  if (name == "theorem1") result.exit_code = run_theorem1(ctx, result.summary);
  if (name == "theorem2") result.exit_code = run_theorem2(ctx, result.summary);
  if (name == "inverse") result.exit_code = run_inverse(ctx, result.summary);
  if (name == "model") result.exit_code = run_model(ctx, result.summary);
  if (name == "distinguish") result.exit_code = run_distinguish(ctx, result.summary);
  result.files = ctx.files;
  return result;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  return kExitNumerical;
}

}  // namespace toeplab
