#include "oneill/commands.hpp"

#include <algorithm>
#include <cmath>

#include "oneill/errors.hpp"
#include "oneill/invariants.hpp"

namespace oneill {

namespace {

Json box_json(Box const& box) {
  Json out = Json::array();
  for (auto const& r : box.ranges()) out.push_back({r.lo, r.hi});
  return out;
}

Json point_json(std::span<double const> p) { return Json(std::vector<double>(p.begin(), p.end())); }

Json header(std::string_view command) {
  Json out;
  out["version"] = "1";
  out["command"] = command;
  out["schema"] = kProfileSchema;
  return out;
}

Json sampling_json(SignatureSample const& s) {
  Json out;
  out["model"] = s.model;
  out["seed"] = s.seed;
  out["box"] = box_json(s.box);
  out["max_order"] = s.max_order;
  out["requested"] = s.requested;
  out["evaluated"] = s.profiles.size();
  out["skipped"] = s.skipped;
  out["skip_reasons"] = s.skip_reasons;
  return out;
}

Json genericity_json(Genericity const& g) {
  Json out;
  out["dim"] = g.dim;
  out["rank"] = g.rank;
  out["rank_by_order"] = g.rank_by_order;
  out["singular_values"] = g.singular_values;
  out["stratum"] = g.generic ? "generic" : "nongeneric";
  return out;
}

Json aggregate_json(SignatureSample const& s) {
  Json out = Json::object();
  if (s.profiles.empty()) return out;
  auto const& names = s.profiles.front().names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    double lo = s.profiles.front().values[i], hi = lo, sum = 0.0;
    for (auto const& p : s.profiles) {
      lo = std::min(lo, p.values[i]);
      hi = std::max(hi, p.values[i]);
      sum += p.values[i];
    }
    double const mean = sum / s.profiles.size();
    double var = 0.0;
    for (auto const& p : s.profiles) var += (p.values[i] - mean) * (p.values[i] - mean);
    out[names[i]] = {{"min", lo},
                     {"max", hi},
                     {"mean", mean},
                     {"stddev", std::sqrt(var / s.profiles.size())}};
  }
  return out;
}

SignatureSample sample(Scenario const& s) {
  return sample_signatures(s.spec, s.box, s.samples, s.seed, s.max_order, s.name);
}

// Genericity needs dim + 1 evaluated points.
std::optional<Genericity> try_genericity(Scenario const& s, SignatureSample const& sample) {
  if (static_cast<int>(sample.profiles.size()) < s.spec.dim() + 1) return std::nullopt;
  return genericity_rank(s.spec, sample);
}

// --- verify ---------------------------------------------------------------

struct Check {
  explicit Check(std::string n) : name(std::move(n)) {}

  std::string name;
  bool applicable = true;
  double max_residual = 0.0;
  double tolerance = 0.0;
  Point where;
  std::string note;
  Json extra = Json::object();
  bool failed = false;  // failure not expressed by the residual

  void record(double r, std::span<double const> p) {
    if (where.empty() || !(r <= max_residual)) {
      max_residual = r;
      where.assign(p.begin(), p.end());
    }
  }
  bool passed() const { return !applicable || (!failed && max_residual <= tolerance); }

  Json json() const {
    Json out;
    out["name"] = name;
    out["applicable"] = applicable;
    if (applicable) {
      out["max_residual"] = max_residual;
      out["tolerance"] = tolerance;
      out["where"] = where.empty() ? Json(nullptr) : point_json(where);
      out["passed"] = passed();
    }
    if (!note.empty()) out["note"] = note;
    for (auto const& [k, v] : extra.items()) out[k] = v;
    return out;
  }
};

double max_diff(TensorValue const& a, TensorValue const& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.components().size(); ++i) {
    m = std::max(m, std::abs(a.components()[i] - b.components()[i]));
  }
  return m;
}

double antisymmetry(TensorValue const& a, int n, int m) {
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int al = 0; al < m; ++al) {
        r = std::max(r, std::abs(a.at({i, j, al}) + a.at({j, i, al})));
      }
    }
  }
  return r;
}

double symmetry(TensorValue const& t, int n, int m) {
  double r = 0.0;
  for (int al = 0; al < m; ++al) {
    for (int be = 0; be < m; ++be) {
      for (int i = 0; i < n; ++i) {
        r = std::max(r, std::abs(t.at({al, be, i}) - t.at({be, al, i})));
      }
    }
  }
  return r;
}

double bianchi(TensorValue const& r, int d) {
  double out = 0.0;
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          out = std::max(out, std::abs(r.at({l, k, i, j}) + r.at({l, i, j, k}) +
                                       r.at({l, j, k, i})));
        }
      }
    }
  }
  return out;
}

Json check_item_json(CheckItem const& c) {
  Json out;
  out["name"] = c.name;
  out["max_residual"] = c.max_residual;
  out["where"] = c.where.empty() ? Json(nullptr) : point_json(c.where);
  out["component"] = c.component;
  out["passed"] = c.passed;
  return out;
}

Json verdict_json(EquivalenceVerdict const& v) {
  Json checks = Json::array();
  for (auto const& c : v.checks) checks.push_back(check_item_json(c));
  return {{"checks", checks}, {"passed", v.passed}};
}

std::vector<Point> base_samples(MetricField const& base, int count, std::uint64_t seed) {
  auto const& d = base.chart().domain();
  if (!d) throw InputError("base chart " + base.chart().name(0) + " declares no domain");
  return halton_points(*d, count, seed);
}

}  // namespace

void apply_overrides(Scenario& s, Overrides const& o) {
  if (o.max_order) {
    if (*o.max_order < 0 || *o.max_order > kMaxProfileOrder) {
      throw InputError("--max-order must be in 0..3");
    }
    s.max_order = *o.max_order;
  }
  if (o.samples) {
    if (*o.samples < 1) throw InputError("--samples must be >= 1");
    s.samples = *o.samples;
  }
  if (o.seed) s.seed = *o.seed;
  if (o.path) s.path = *o.path;
}

CommandResult run_profile(Scenario const& s) {
  SignatureSample const smp = sample(s);
  Json r = header("profile");
  r["scenario"] = s.echo;
  r["sampling"] = sampling_json(smp);
  r["invariants"] = profile_names_through(s.max_order);
  Json points = Json::array();
  for (auto const& p : smp.profiles) {
    Json values = Json::object();
    for (std::size_t i = 0; i < p.names.size(); ++i) values[p.names[i]] = p.values[i];
    points.push_back({{"x", point_json(p.point)}, {"values", values}});
  }
  r["points"] = points;
  r["aggregate"] = aggregate_json(smp);
  auto const g = try_genericity(s, smp);
  r["genericity"] = g ? genericity_json(*g) : Json(nullptr);
  return {r, kExitOk};
}

CommandResult run_compare(Scenario const& a, Scenario const& b) {
  if (a.max_order != b.max_order) {
    throw InputError("profile schema mismatch: scenarios use max_order " +
                     std::to_string(a.max_order) + " and " + std::to_string(b.max_order));
  }
  SignatureSample const sa = sample(a);
  SignatureSample const sb = sample(b);
  Genericity const ga = genericity_rank(a.spec, sa);
  Genericity const gb = genericity_rank(b.spec, sb);
  double const tol = std::max(a.tol.compare_rel, b.tol.compare_rel);
  Comparison const c = compare(sa, ga, sb, gb, tol);

  Json r = header("compare");
  r["scenarios"] = {a.echo, b.echo};
  r["sampling"] = {sampling_json(sa), sampling_json(sb)};
  r["genericity"] = {genericity_json(ga), genericity_json(gb)};
  r["tolerance"] = tol;
  r["verdict"] = verdict_name(c.verdict);
  r["order"] = c.order;
  r["distance"] = c.distance;
  r["worst_invariant"] = c.worst_invariant;
  r["separating_invariants"] = c.separating;
  r["note"] = c.note;
  Json steps = Json::array();
  for (auto const& st : c.steps) {
    steps.push_back({{"order", st.order},
                     {"distance", st.distance},
                     {"verdict", verdict_name(st.verdict)}});
  }
  r["steps"] = steps;
  Json evidence = Json::array();
  for (auto const& e : c.evidence) {
    evidence.push_back({{"name", e.name},
                        {"range_a", {e.min_a, e.max_a}},
                        {"range_b", {e.min_b, e.max_b}},
                        {"scale", e.scale}});
  }
  r["evidence"] = evidence;
  return {r, c.verdict == Verdict::kDistinct ? kExitVerdict : kExitOk};
}

CommandResult run_verify(Scenario const& s) {
  SubmersionSpec const& spec = s.spec;
  Tolerances const tol = s.tol.submersion();
  std::vector<Point> const pts = halton_points(s.box, s.samples, s.seed);
  int const n = spec.base_dim(), m = spec.fiber_dim(), d = spec.dim();

  SubmersionReport const sub = check_submersion(spec, pts, tol);
  Check submersion{"riemannian_submersion"};
  submersion.tolerance = tol.structural;
  for (auto const& pc : sub.points) submersion.record(pc.deviation, pc.point);

  Check anti{"A_antisymmetry"}, sym{"T_symmetry"}, bracket{"vertical_bracket"},
      bian{"first_bianchi"}, compat{"metric_compatibility"},
      horiz{"horizontal_curvature"}, gauss{"gauss_equation"};
  for (Check* c : {&anti, &sym, &bracket, &bian, &compat, &horiz, &gauss}) {
    c->tolerance = tol.identity;
  }
  bracket.note = "ver[X,Y] = 2 A(X,Y) for horizontal extensions";
  horiz.note = "K_B(dpi X, dpi Y) - K_M(X,Y) - 3|A(X,Y)|^2";
  gauss.note = "K_M(U,V) - K_F(U,V) + <T(U,U),T(V,V)> - |T(U,V)|^2";

  Tensor<Expr> gt(d, {Variance::kLower, Variance::kLower});
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) gt.at({i, j}) = spec.total().component(i, j);
  }
  std::optional<FiberMetric> fiber;
  if (s.warped && m >= 2) fiber = warped_fiber_metric(*s.warped);
  if (n < 2) {
    horiz.applicable = false;
    horiz.note = "base dimension < 2: no horizontal planes";
  }
  if (!fiber) {
    gauss.applicable = false;
    gauss.note = m < 2 ? "fiber dimension < 2: no vertical planes"
                       : "needs the induced fiber metric (product and warped models only)";
  }

  Check closed{"closed_form"};
  closed.tolerance = s.tol.closed_form;
  closed.applicable = s.warped.has_value() || s.killing.has_value();
  if (s.warped) closed.note = "T and H against -g(U,V) grad ln f and -m grad ln f";
  if (s.killing) closed.note = "A and H against -(phi/2) Omega(X,Y) U and -grad ln phi";
  if (!closed.applicable) closed.note = "no closed form for this model";

  std::uint64_t trial_seed = s.seed + 1;
  for (auto const& p : pts) {
    AdaptedFrame const f = adapted_frame_at(spec, p);
    TensorValue const a = oneill_A_at(spec, f);
    TensorValue const t = oneill_T_at(spec, f);
    anti.record(antisymmetry(a, n, m), p);
    sym.record(symmetry(t, n, m), p);
    bracket.record(bracket_identity_residual(spec, p), p);
    bian.record(bianchi(riemann_at(spec.total(), p), d), p);
    compat.record(max_abs(values(covariant_derivative_field(gt, spec.total(), 1, p))), p);
    if (horiz.applicable) {
      horiz.record(verify_horizontal_identity(spec, p, 10, trial_seed).max_residual, p);
    }
    if (gauss.applicable) {
      gauss.record(verify_gauss_identity(spec, *fiber, p, 10, trial_seed).max_residual, p);
    }
    ++trial_seed;
    Eigen::VectorXd const h = mean_curvature_at(spec, f);
    if (s.warped) {
      WarpedClosedForm const c = warped_closed_form_TH(*s.warped, f);
      closed.record(std::max(max_diff(t, c.t), (h - c.h).cwiseAbs().maxCoeff()), p);
    } else if (s.killing) {
      KillingClosedForm const c = killing_closed_form_AH(*s.killing, f);
      closed.record(std::max(max_diff(a, c.a), (h - c.h).cwiseAbs().maxCoeff()), p);
    }
  }

  IntegrabilityReport const integ = integrability_check(spec, pts, tol);
  Check integrability{"integrability"};
  integrability.tolerance = tol.structural;
  integrability.applicable = false;
  integrability.note = "informational: max |A| over the samples";
  integrability.extra = {{"max_norm_A", integ.max_norm},
                         {"verdict", integ.verdict == Integrability::kIntegrable
                                         ? "integrable"
                                         : "not integrable"}};

  Check killing{"killing_field"};
  killing.tolerance = s.tol.structural;
  if (s.killing_field.empty()) {
    killing.applicable = false;
    killing.note = "no Killing field declared by the model";
  } else {
    KillingReport const k = killing_check(spec, s.killing_field, pts, s.tol.structural);
    killing.max_residual = k.max_residual;
    killing.where = k.where;
    killing.extra = {{"min_norm", k.min_norm}};
    if (!k.passed && k.max_residual <= killing.tolerance) {
      killing.note = "field vanishes somewhere";
      killing.failed = true;
    }
  }

  std::vector<Check const*> const all{&submersion, &anti, &sym, &bracket, &bian, &compat,
                                      &horiz, &gauss, &closed, &integrability, &killing};
  Json checks = Json::array();
  bool passed = true;
  for (auto const* c : all) {
    checks.push_back(c->json());
    passed = passed && c->passed();
  }
  Json r = header("verify");
  r["scenario"] = s.echo;
  r["points"] = pts.size();
  r["checks"] = checks;
  r["passed"] = passed;
  return {r, passed ? kExitOk : kExitVerdict};
}

CommandResult run_equivalence(Scenario const& a, Scenario const& b,
                              Candidates const& cand) {
  std::vector<Point> const pts = halton_points(a.box, a.samples, a.seed);
  NaturalityReport const nat =
      verify_naturality(a.spec, b.spec, cand.phi, cand.psi, pts, a.tol.submersion());
  Json natj;
  natj["points"] = nat.points.size();
  natj["skipped"] = nat.skipped;
  natj["warnings"] = nat.warnings;
  natj["max_metric_residual"] = nat.max_metric;
  natj["max_base_residual"] = nat.max_base;
  natj["max_commute_residual"] = nat.max_commute;
  natj["max_invariant_residual"] = nat.max_invariant;
  natj["passed"] = nat.passed;

  Json cls = nullptr;
  bool passed = nat.passed;
  std::string note;
  if (a.warped && b.warped) {
    if (!cand.c || !cand.fiber_isometry) {
      throw InputError("candidates: warped equivalence needs \"c\" and \"fiber_isometry\"");
    }
    auto const bp = base_samples(a.warped->base, a.samples, a.seed);
    auto const fp = base_samples(a.warped->fiber, a.samples, a.seed);
    EquivalenceVerdict const v = warped_equivalence_check(
        *a.warped, *b.warped, cand.psi, *cand.c, *cand.fiber_isometry, bp, fp,
        a.tol.equivalence);
    cls = verdict_json(v);
    cls["criterion"] = "warped";
    passed = passed && v.passed;
  } else if (a.killing && b.killing) {
    auto const bp = base_samples(a.killing->base, a.samples, a.seed);
    EquivalenceVerdict const v =
        killing_equivalence_check(*a.killing, *b.killing, cand.psi, bp, a.tol.equivalence);
    cls = verdict_json(v);
    cls["criterion"] = "killing";
    passed = passed && v.passed;
  } else {
    note = "no class-specific criterion for this pair; naturality only";
  }

  Json r = header("equivalence");
  r["scenarios"] = {a.echo, b.echo};
  r["candidates"] = cand.echo;
  r["naturality"] = natj;
  r["class_check"] = cls;
  if (!note.empty()) r["note"] = note;
  r["verdict"] = passed ? "PASS" : "FAIL";
  return {r, passed ? kExitOk : kExitVerdict};
}

CommandResult run_reconstruct(Scenario const& s) {
  if (s.path.empty()) {
    throw InputError("reconstruct needs a base path (scenario \"reconstruct.path\" or --path)");
  }
  Reconstruction const rec = reconstruct_warp(s.spec, s.path, s.spec.fiber_dim());
  Json r = header("reconstruct");
  r["scenario"] = s.echo;
  r["m"] = s.spec.fiber_dim();
  Json verts = Json::array();
  for (auto const& v : rec.vertices) verts.push_back(point_json(v));
  r["vertices"] = verts;
  r["u"] = rec.u;
  r["max_norm_A"] = rec.max_a;
  r["evaluations"] = rec.evaluations;
  int code = kExitOk;
  if (s.warped) {
    auto const& names = s.warped->base.chart().names();
    double const u0 = std::log(eval(s.warped->f, names, rec.vertices.front()));
    std::vector<double> declared;
    double err = 0.0;
    for (std::size_t i = 0; i < rec.vertices.size(); ++i) {
      declared.push_back(std::log(eval(s.warped->f, names, rec.vertices[i])) - u0);
      err = std::max(err, std::abs(declared.back() - rec.u[i]));
    }
    bool const ok = err <= s.tol.reconstruct;
    r["declared"] = {{"u", declared},
                     {"max_error", err},
                     {"tolerance", s.tol.reconstruct},
                     {"passed", ok}};
    if (!ok) code = kExitVerdict;
  } else {
    r["declared"] = nullptr;
  }
  return {r, code};
}

}  // namespace oneill
