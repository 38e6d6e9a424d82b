#include "toeplab/io.hpp"

#include "toeplab/errors.hpp"

#include <charconv>
#include <cmath>
#include <complex>

namespace toeplab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("io: " + path + ": " + what);
}

std::int64_t int_field(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::vector<std::int64_t> int_array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(int_field(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

MultiIndex multiindex_field(const Json& j, std::size_t n, const std::string& path) {
  auto v = int_array(j, path);
  if (v.size() != n) fail(path, "expected " + std::to_string(n) + " entries");
  for (auto e : v)
    if (e < 0) fail(path, "entries must be non-negative");
  return MultiIndex(std::move(v));
}

double number_field(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(path + "." + it.key(), "unknown field");
  }
}

const Json& required(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing required field");
  return j.at(key);
}

}  // namespace

Rational rational_from_json(const Json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return parse_rational(format_double(j.get<double>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  fail(path, "expected a number or a rational string");
}

SubtorusData subtorus_from_json(const Json& j, const std::string& path) {
  only_keys(j, {"n", "d", "Bt", "alpha"}, path);
  SubtorusData sub;
  const auto n = int_field(required(j, "n", path), path + ".n");
  const auto d = int_field(required(j, "d", path), path + ".d");
  if (n < 1) fail(path + ".n", "must be >= 1");
  if (d < 1) fail(path + ".d", "must be >= 1");
  sub.n = static_cast<std::size_t>(n);
  sub.d = static_cast<std::size_t>(d);
  const Json& bt = required(j, "Bt", path);
  if (!bt.is_array()) fail(path + ".Bt", "expected a d x n integer matrix");
  for (std::size_t r = 0; r < bt.size(); ++r) sub.bt.push_back(int_array(bt[r], path + ".Bt[" + std::to_string(r) + "]"));
  sub.alpha = int_array(required(j, "alpha", path), path + ".alpha");
  try {
    sub.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return sub;
}

Json to_json(const SubtorusData& sub) {
  return Json{{"n", sub.n}, {"d", sub.d}, {"Bt", sub.bt}, {"alpha", sub.alpha}};
}

SymbolPoly symbol_poly_from_json(const Json& j, std::size_t n, const std::string& path) {
  only_keys(j, {"terms"}, path);
  const Json& terms = required(j, "terms", path);
  if (!terms.is_array()) fail(path + ".terms", "expected an array");
  std::vector<SymbolTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = path + ".terms[" + std::to_string(i) + "]";
    only_keys(terms[i], {"gamma", "delta", "re", "im"}, p);
    SymbolTerm t;
    t.gamma = multiindex_field(required(terms[i], "gamma", p), n, p + ".gamma");
    t.delta = multiindex_field(required(terms[i], "delta", p), n, p + ".delta");
    const double re = number_field(required(terms[i], "re", p), p + ".re");
    const double im = terms[i].contains("im") ? number_field(terms[i]["im"], p + ".im") : 0.0;
    t.coeff = {re, im};
    out.push_back(std::move(t));
  }
  SymbolPoly symbol(n, std::move(out));
  try {
    symbol.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return symbol;
}

Json to_json(const SymbolPoly& symbol) {
  Json terms = Json::array();
  for (const auto& t : symbol.terms())
    terms.push_back({{"gamma", std::vector<std::int64_t>(t.gamma.begin(), t.gamma.end())},
                     {"delta", std::vector<std::int64_t>(t.delta.begin(), t.delta.end())},
                     {"re", t.coeff.real()},
                     {"im", t.coeff.imag()}});
  return Json{{"terms", terms}};
}

InvariantSymbol invariant_symbol_from_json(const Json& j, std::size_t n, const std::string& path) {
  only_keys(j, {"terms"}, path);
  const Json& terms = required(j, "terms", path);
  if (!terms.is_array()) fail(path + ".terms", "expected an array");
  std::vector<InvariantTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = path + ".terms[" + std::to_string(i) + "]";
    only_keys(terms[i], {"gamma", "coeff"}, p);
    out.push_back({multiindex_field(required(terms[i], "gamma", p), n, p + ".gamma"),
                   rational_from_json(required(terms[i], "coeff", p), p + ".coeff")});
  }
  return InvariantSymbol::polynomial(n, std::move(out));
}

Json to_json(const InvariantSymbol& symbol) {
  if (!symbol.has_polynomial()) throw ValidationError("io::to_json: symbol has no polynomial form");
  Json terms = Json::array();
  for (const auto& t : symbol.terms())
    terms.push_back({{"gamma", std::vector<std::int64_t>(t.gamma.begin(), t.gamma.end())}, {"coeff", to_string(t.coeff)}});
  return Json{{"terms", terms}};
}

Json to_json(const AsymptoticFit& fit) {
  return Json{{"c", fit.coefficients},
              {"residual", fit.residual_norm},
              {"k_range", fit.k_range},
              {"order", fit.order},
              {"c0_uncertainty", fit.c0_uncertainty},
              {"condition_number", fit.condition_number}};
}

Json to_json(const McEstimate& mc) {
  return Json{{"c0", mc.estimate}, {"stderr", mc.standard_error}, {"samples", mc.samples}, {"seed", mc.seed}};
}

Json to_json(const IsometryReport& report) {
  Json exceed = Json::array();
  for (const auto& e : report.exceedances)
    exceed.push_back({{"matrix", e.matrix}, {"row", e.row}, {"col", e.col}, {"defect", e.defect}});
  return Json{{"pass", report.pass},
              {"tolerance", report.tolerance},
              {"count", report.count},
              {"max_isometry_defect", report.max_isometry_defect},
              {"max_gram_offdiag", report.max_gram_offdiag},
              {"max_idempotency_defect", report.max_idempotency_defect},
              {"max_self_adjoint_defect", report.max_self_adjoint_defect},
              {"projector_bound", report.projector_bound},
              {"quad", {{"hermite_nodes", report.quad.hermite_nodes}, {"fourier_nodes", report.quad.fourier_nodes}}},
              {"exceedances", exceed},
              {"warnings", report.warnings}};
}

Json to_json(const RegularFreeReport& report) {
  Json vertices = Json::array();
  for (const auto& v : report.vertices) {
    std::vector<std::string> point;
    for (const auto& c : v.vertex.point) point.push_back(to_string(c));
    Json entry{{"vertex", point},
               {"support", v.vertex.support},
               {"full_rank", v.full_rank},
               {"minor_gcd", v.minor_gcd.str()},
               {"pass", v.pass}};
    if (!v.pass) {
      entry["violating_columns"] = v.violating_columns;
      entry["violating_minor"] = v.violating_minor.str();
    }
    vertices.push_back(entry);
  }
  return Json{{"pass", report.pass}, {"vertices", vertices}};
}

Json to_json(const DistinguishReport& report) {
  Json j{{"k_max", report.k_max}, {"tolerance", report.tolerance}, {"distinguished", report.distinguished()}};
  j["labeled_k"] = report.labeled_k ? Json(*report.labeled_k) : Json(nullptr);
  j["multiset_k"] = report.multiset_k ? Json(*report.multiset_k) : Json(nullptr);
  j["verdict"] = report.labeled_k ? "distinguished at k=" + std::to_string(*report.labeled_k)
                                  : "indistinguishable up to k_max";
  return j;
}

void write_block_csv(std::ostream& out, const ToeplitzBlock& block) {
  out << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < block.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < block.matrix.cols(); ++c) {
      const auto v = block.matrix(r, c);
      if (v == std::complex<double>(0.0, 0.0)) continue;
      out << r << ',' << c << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const EquivariantSpectrum& spec, bool header) {
  if (header) {
    out << 'k';
    for (std::size_t i = 1; i <= spec.sub.n; ++i) out << ",beta" << i;
    out << ",lambda\n";
  }
  for (const auto& e : spec.entries) {
    out << spec.k;
    for (auto b : e.beta) out << ',' << b;
    out << ',' << format_double(e.lambda) << '\n';
  }
}

void write_reconstruction_csv(std::ostream& out, const Reconstruction& rec, std::size_t n, bool header) {
  if (header) {
    for (std::size_t i = 1; i <= n; ++i) out << 'a' << i << ',';
    out << "p_hat,p_true,abs_err,k_max,order,status\n";
  }
  for (const auto& p : rec.points) {
    Rational total = 0;
    for (const auto& c : p.point) total += c;
    for (const auto& c : p.point) out << to_string(Rational(c / total)) << ',';
    out << (p.missing ? "" : format_double(p.p_hat)) << ',' << (p.p_true ? format_double(*p.p_true) : "") << ','
        << (p.abs_err ? format_double(*p.abs_err) : "") << ',' << rec.k_max << ',' << rec.order << ','
        << (p.missing ? "missing: " + p.reason : (p.low_confidence ? "low_confidence" : "ok")) << '\n';
  }
}

}  // namespace toeplab
