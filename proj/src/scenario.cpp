#include "oneill/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "oneill/errors.hpp"
#include "oneill/invariants.hpp"

namespace oneill {

namespace {

[[noreturn]] void fail(std::string const& where, std::string const& what) {
  throw InputError(where + ": " + what);
}

void allow_keys(Json const& obj, std::string const& where,
                std::set<std::string> const& keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (auto const& [k, v] : obj.items()) {
    if (!keys.count(k)) fail(where, "unknown key \"" + k + "\"");
  }
}

Json const* find(Json const& obj, std::string const& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

Json const& require(Json const& obj, std::string const& key, std::string const& where) {
  if (auto const* v = find(obj, key)) return *v;
  fail(where, "missing required key \"" + key + "\"");
}

std::string as_string(Json const& v, std::string const& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

double as_number(Json const& v, std::string const& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(Json const& v, std::string const& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::vector<std::string> as_names(Json const& v, std::string const& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_string(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Expr as_expr(Json const& v, std::string const& where,
             std::vector<std::string> const& vars) {
  std::string text;
  if (v.is_number()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    text = s.str();
  } else {
    text = as_string(v, where);
  }
  try {
    return parse(text, vars);
  } catch (InputError const& e) {
    fail(where, e.what());
  }
}

std::vector<Expr> as_exprs(Json const& v, std::string const& where,
                           std::vector<std::string> const& vars) {
  if (!v.is_array()) fail(where, "expected an array of expressions");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_expr(v[i], where + "[" + std::to_string(i) + "]", vars));
  }
  return out;
}

Box as_box(Json const& v, std::string const& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected an array of [lo, hi] pairs");
  std::vector<Interval> ranges;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string const w = where + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) fail(w, "expected [lo, hi]");
    double const lo = as_number(v[i][0], w + "[0]");
    double const hi = as_number(v[i][1], w + "[1]");
    if (!(lo < hi)) fail(w, "empty interval");
    ranges.push_back({lo, hi});
  }
  return Box(std::move(ranges));
}

MetricField as_chart_metric(Json const& v, std::string const& where) {
  allow_keys(v, where, {"coordinates", "domain", "metric"});
  auto names = as_names(require(v, "coordinates", where), where + ".coordinates");
  std::optional<Box> box;
  if (auto const* d = find(v, "domain")) {
    box = as_box(*d, where + ".domain");
    if (box->dim() != static_cast<int>(names.size())) {
      fail(where + ".domain", "needs one interval per coordinate");
    }
  }
  Json const& m = require(v, "metric", where);
  std::string const mw = where + ".metric";
  if (!m.is_array() || m.size() != names.size()) {
    fail(mw, "expected a " + std::to_string(names.size()) + "x" +
                 std::to_string(names.size()) + " matrix");
  }
  std::vector<std::vector<Expr>> rows;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::string const rw = mw + "[" + std::to_string(i) + "]";
    if (!m[i].is_array() || m[i].size() != names.size()) fail(rw, "wrong row length");
    rows.push_back(as_exprs(m[i], rw, names));
  }
  try {
    return MetricField(Chart(std::move(names), std::move(box)), std::move(rows));
  } catch (InputError const& e) {
    fail(where, e.what());
  } catch (StructuralError const& e) {
    fail(where, e.what());
  }
}

MetricField default_line(std::string name) {
  return MetricField(Chart({std::move(name)}, Box({{-1.0, 1.0}})),
                     {{Expr::constant(1.0)}});
}

MetricField default_flat(std::vector<std::string> names) {
  int const n = static_cast<int>(names.size());
  std::vector<std::vector<Expr>> rows(n, std::vector<Expr>(n, Expr::constant(0.0)));
  for (int i = 0; i < n; ++i) rows[i][i] = Expr::constant(1.0);
  return MetricField(Chart(std::move(names), Box(std::vector<Interval>(n, {-1.0, 1.0}))),
                     std::move(rows));
}

MetricField chart_or(Json const& params, std::string const& key, std::string const& where,
                     MetricField fallback) {
  if (auto const* v = find(params, key)) return as_chart_metric(*v, where + "." + key);
  return fallback;
}

template <typename F>
auto build(std::string const& where, F&& f) {
  try {
    return f();
  } catch (InputError const& e) {
    fail(where, e.what());
  } catch (StructuralError const& e) {
    fail(where, e.what());
  } catch (DomainError const& e) {
    fail(where, e.what());
  }
}

void parse_model(Json const& m, Scenario& s) {
  std::string const where = "model";
  if (!m.is_object()) fail(where, "expected an object");
  if (find(m, "builtin")) {
    allow_keys(m, where, {"builtin", "params"});
    std::string const kind = as_string(m["builtin"], where + ".builtin");
    Json const params = find(m, "params") ? m["params"] : Json::object();
    std::string const pw = where + ".params";
    if (kind == "product") {
      allow_keys(params, pw, {"base", "fiber"});
      s.kind = ModelKind::kProduct;
      MetricField base = chart_or(params, "base", pw, default_line("x"));
      MetricField fiber = chart_or(params, "fiber", pw, default_line("y"));
      s.warped = WarpedProductSpec{base, fiber, Expr::constant(1.0)};
      s.spec = build(where, [&] { return build_product(base, fiber); });
    } else if (kind == "warped") {
      allow_keys(params, pw, {"base", "fiber", "fiber_dim", "f"});
      s.kind = ModelKind::kWarped;
      MetricField base = chart_or(params, "base", pw, default_line("x"));
      MetricField fiber;
      if (auto const* fv = find(params, "fiber")) {
        if (find(params, "fiber_dim")) fail(pw, "give either fiber or fiber_dim");
        fiber = as_chart_metric(*fv, pw + ".fiber");
      } else {
        std::int64_t m_dim = 1;
        if (auto const* d = find(params, "fiber_dim")) {
          m_dim = as_integer(*d, pw + ".fiber_dim");
        }
        static std::vector<std::string> const kFiber{"y", "z", "w"};
        if (m_dim < 1 || m_dim > 3) fail(pw + ".fiber_dim", "must be 1, 2 or 3");
        fiber = default_flat({kFiber.begin(), kFiber.begin() + m_dim});
      }
      Expr f = as_expr(require(params, "f", pw), pw + ".f", base.chart().names());
      s.warped = WarpedProductSpec{base, fiber, f};
      s.spec = build(where, [&] { return build_warped(*s.warped); });
    } else if (kind == "hopf") {
      allow_keys(params, pw, {});
      s.kind = ModelKind::kHopf;
      s.spec = build_hopf();
      s.killing_field = {Expr::constant(0.0), Expr::constant(1.0), Expr::constant(1.0)};
    } else if (kind == "killing") {
      allow_keys(params, pw, {"base", "phi", "alpha", "fiber_name", "fiber_range"});
      s.kind = ModelKind::kKilling;
      KillingOrbitSpec k;
      k.base = chart_or(params, "base", pw, default_flat({"x", "y"}));
      auto const& names = k.base.chart().names();
      k.phi = find(params, "phi") ? as_expr(params["phi"], pw + ".phi", names)
                                  : Expr::constant(1.0);
      k.alpha = as_exprs(require(params, "alpha", pw), pw + ".alpha", names);
      if (static_cast<int>(k.alpha.size()) != k.base.dim()) {
        fail(pw + ".alpha", "needs one component per base coordinate");
      }
      if (auto const* n = find(params, "fiber_name")) {
        k.fiber_name = as_string(*n, pw + ".fiber_name");
      }
      if (auto const* r = find(params, "fiber_range")) {
        Box const b = as_box(Json::array({*r}), pw + ".fiber_range");
        k.fiber_range = b.range(0);
      }
      KillingModel const km = build(where, [&] { return build_killing_total(k); });
      s.killing = std::move(k);
      s.spec = km.spec;
      s.killing_field = km.killing;
    } else {
      fail(where + ".builtin", "unknown model \"" + kind +
                                   "\" (expected product, warped, hopf or killing)");
    }
    return;
  }
  allow_keys(m, where, {"total", "base", "map"});
  s.kind = ModelKind::kExplicit;
  MetricField total = as_chart_metric(require(m, "total", where), where + ".total");
  MetricField base = as_chart_metric(require(m, "base", where), where + ".base");
  std::vector<Expr> map =
      as_exprs(require(m, "map", where), where + ".map", total.chart().names());
  s.spec = build(where, [&] { return SubmersionSpec(total, base, map); });
}

void parse_tolerances(Json const& t, ScenarioTolerances& tol) {
  std::string const where = "tolerances";
  allow_keys(t, where, {"structural", "identity", "orthonormality", "closed_form",
                        "equivalence", "compare_rel", "reconstruct"});
  auto read = [&](char const* key, double& out) {
    if (auto const* v = find(t, key)) {
      out = as_number(*v, where + "." + key);
      if (!(out > 0.0)) fail(where + "." + key, "must be positive");
    }
  };
  read("structural", tol.structural);
  read("identity", tol.identity);
  read("orthonormality", tol.orthonormality);
  read("closed_form", tol.closed_form);
  read("equivalence", tol.equivalence);
  read("compare_rel", tol.compare_rel);
  read("reconstruct", tol.reconstruct);
}

std::vector<Point> as_points(Json const& v, std::string const& where, int dim) {
  if (!v.is_array() || v.size() < 2) fail(where, "expected at least two points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string const w = where + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != dim) {
      fail(w, "expected " + std::to_string(dim) + " coordinates");
    }
    Point p;
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      p.push_back(as_number(v[i][j], w + "[" + std::to_string(j) + "]"));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kExplicit: return "explicit";
    case ModelKind::kProduct: return "product";
    case ModelKind::kWarped: return "warped";
    case ModelKind::kHopf: return "hopf";
    case ModelKind::kKilling: return "killing";
  }
  return "explicit";
}

Scenario parse_scenario(Json const& doc) {
  allow_keys(doc, "scenario", {"version", "name", "model", "domain", "samples", "seed",
                               "max_order", "tolerances", "reconstruct"});
  if (as_string(require(doc, "version", "scenario"), "version") != "1") {
    fail("version", "unsupported scenario version (expected \"1\")");
  }
  Scenario s;
  s.echo = doc;
  if (auto const* n = find(doc, "name")) s.name = as_string(*n, "name");
  parse_model(require(doc, "model", "scenario"), s);
  if (s.name.empty()) s.name = std::string(model_kind_name(s.kind));

  auto const& total_domain = s.spec.total().chart().domain();
  if (auto const* d = find(doc, "domain")) {
    s.box = as_box(*d, "domain");
    if (s.box.dim() != s.spec.dim()) {
      fail("domain", "needs one interval per total coordinate");
    }
    if (total_domain) {
      for (int i = 0; i < s.box.dim(); ++i) {
        auto const& r = s.box.range(i);
        auto const& c = total_domain->range(i);
        if (r.lo < c.lo || r.hi > c.hi) {
          fail("domain", "leaves the chart domain in coordinate " +
                             s.spec.total().chart().name(i));
        }
      }
    }
  } else if (total_domain) {
    s.box = *total_domain;
  } else {
    fail("domain", "required when the total chart declares no domain");
  }
  if (auto const* v = find(doc, "samples")) {
    std::int64_t const n = as_integer(*v, "samples");
    if (n < 1 || n > 100000) fail("samples", "must be in 1..100000");
    s.samples = static_cast<int>(n);
  }
  if (auto const* v = find(doc, "seed")) {
    std::int64_t const n = as_integer(*v, "seed");
    if (n < 0) fail("seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(n);
  }
  if (auto const* v = find(doc, "max_order")) {
    std::int64_t const n = as_integer(*v, "max_order");
    if (n < 0 || n > kMaxProfileOrder) fail("max_order", "must be in 0..3");
    s.max_order = static_cast<int>(n);
  }
  if (auto const* t = find(doc, "tolerances")) parse_tolerances(*t, s.tol);
  if (auto const* r = find(doc, "reconstruct")) {
    allow_keys(*r, "reconstruct", {"path"});
    s.path = as_points(require(*r, "path", "reconstruct"), "reconstruct.path",
                       s.spec.base_dim());
  }
  return s;
}

Json read_json_file(std::filesystem::path const& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file.string());
  try {
    return Json::parse(in);
  } catch (Json::parse_error const& e) {
    throw InputError(file.string() + ": " + e.what());
  }
}

Scenario load_scenario(std::filesystem::path const& file) {
  Json const doc = read_json_file(file);
  try {
    return parse_scenario(doc);
  } catch (InputError const& e) {
    throw InputError(file.string() + ": " + e.what());
  }
}

Candidates parse_candidates(Json const& doc, Scenario const& a, Scenario const& b) {
  std::string const where = "candidates";
  allow_keys(doc, where, {"version", "phi", "psi", "c", "fiber_isometry"});
  if (auto const* v = find(doc, "version")) {
    if (as_string(*v, "version") != "1") fail("version", "expected \"1\"");
  }
  Candidates out;
  out.echo = doc;
  auto const& total = a.spec.total().chart().names();
  auto const& base = a.spec.base().chart().names();
  out.phi = as_exprs(require(doc, "phi", where), "phi", total);
  out.psi = as_exprs(require(doc, "psi", where), "psi", base);
  if (static_cast<int>(out.phi.size()) != b.spec.dim()) {
    fail("phi", "needs one component per total coordinate of the second scenario");
  }
  if (static_cast<int>(out.psi.size()) != b.spec.base_dim()) {
    fail("psi", "needs one component per base coordinate of the second scenario");
  }
  if (auto const* c = find(doc, "c")) {
    out.c = as_number(*c, "c");
    if (!(*out.c > 0.0)) fail("c", "must be positive");
  }
  if (auto const* f = find(doc, "fiber_isometry")) {
    if (!a.warped || !b.warped) {
      fail("fiber_isometry", "only meaningful for product or warped scenarios");
    }
    out.fiber_isometry =
        as_exprs(*f, "fiber_isometry", a.warped->fiber.chart().names());
    if (static_cast<int>(out.fiber_isometry->size()) != b.warped->fiber.dim()) {
      fail("fiber_isometry", "needs one component per fiber coordinate of the second scenario");
    }
  }
  return out;
}

std::vector<Point> parse_path(std::string const& text, int base_dim) {
  std::vector<Point> out;
  std::stringstream vertices(text);
  std::string vertex;
  while (std::getline(vertices, vertex, ';')) {
    Point p;
    std::stringstream coords(vertex);
    std::string c;
    while (std::getline(coords, c, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (std::exception const&) {
        used = 0;
      }
      if (used == 0 || c.find_first_not_of(" \t", used) != std::string::npos) {
        throw InputError("--path: bad number \"" + c + "\"");
      }
      p.push_back(v);
    }
    if (static_cast<int>(p.size()) != base_dim) {
      throw InputError("--path: each vertex needs " + std::to_string(base_dim) +
                       " coordinates");
    }
    out.push_back(std::move(p));
  }
  if (out.size() < 2) throw InputError("--path: need at least two vertices");
  return out;
}

}  // namespace oneill
