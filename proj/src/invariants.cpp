#include "oneill/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "oneill/errors.hpp"

namespace oneill {

namespace {

std::array<std::vector<std::string>, kMaxProfileOrder + 1> const kNames{{
    {"A2", "T2", "H2"},
    {"gradH2", "divH", "gradA2", "gradT2"},
    {"scal", "ricci2", "riem2", "gradScal2", "lapA2surrogate", "lapT2surrogate"},
    {"grad2Riem2", "mixAR", "mixTR"},
}};

void check_order(int max_order) {
  if (max_order < 0 || max_order > kMaxProfileOrder) {
    throw InputError("max order must be in 0.." + std::to_string(kMaxProfileOrder));
  }
}

std::string format_point(std::span<double const> p) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << p[i];
  out << ')';
  return out.str();
}

class ProfileBuilder {
 public:
  ProfileBuilder(SubmersionSpec const& spec, std::span<double const> p, int max_order)
      : germ_(spec, p, std::max(1, max_order + 1)),
        g_(germ_.metric().metric_value()) {}

  void order0(InvariantProfile& out) const {
    // The full norms count A_X U and T_U X as well, which mirror A_X Y and
    // T_U V; half of each is the frame sum.
    push(out, 0.5 * norm(germ_.A()));
    push(out, 0.5 * norm(germ_.T()));
    push(out, norm(germ_.H()));
  }

  void order1(InvariantProfile& out) {
    MetricGerm const& m = germ_.metric();
    nabla_h_ = m.covariant_derivative(germ_.H());
    nabla_a_ = m.covariant_derivative(germ_.A());
    nabla_t_ = m.covariant_derivative(germ_.T());
    push(out, norm(nabla_h_));
    push(out, contract(values(nabla_h_), 0, 1)[0]);
    push(out, norm(nabla_a_));
    push(out, norm(nabla_t_));
  }

  void order2(InvariantProfile& out) const {
    MetricGerm const& m = germ_.metric();
    Tensor<Jet> const& r = m.riemann();
    Tensor<Jet> const ric = contract(r, 0, 2);
    JetMatrix const& gi = m.inverse_metric();
    Jet scal;
    for (int k = 0; k < m.dim(); ++k) {
      for (int j = 0; j < m.dim(); ++j) scal += gi(k, j) * ric.at({k, j});
    }
    push(out, scal.value());
    push(out, norm(ric));
    push(out, norm(r));
    push(out, norm(m.covariant_derivative(Tensor<Jet>::scalar(scal))));
    push(out, norm(m.covariant_derivative(nabla_a_)));
    push(out, norm(m.covariant_derivative(nabla_t_)));
  }

  void order3(InvariantProfile& out) const {
    MetricGerm const& m = germ_.metric();
    push(out, norm(m.covariant_derivative(m.covariant_derivative(m.riemann()))));
    TensorValue const h = values(germ_.H());
    push(out, norm_sq(contract_pair(h, 0, values(nabla_a_), 0), g_));
    push(out, norm_sq(contract_pair(h, 0, values(nabla_t_), 0), g_));
  }

 private:
  double norm(Tensor<Jet> const& t) const { return norm_sq(values(t), g_); }
  static void push(InvariantProfile& out, double v) { out.values.push_back(v); }

  SubmersionGerm germ_;
  Eigen::MatrixXd g_;
  Tensor<Jet> nabla_h_, nabla_a_, nabla_t_;
};

// Jacobian of the profile (rows = invariants) by central differences.
Eigen::MatrixXd profile_jacobian(SubmersionSpec const& spec, Point const& p,
                                 int max_order, double h) {
  int const dim = spec.dim();
  std::size_t const rows = profile_names_through(max_order).size();
  Eigen::MatrixXd jac(rows, dim);
  for (int c = 0; c < dim; ++c) {
    Point plus = p, minus = p;
    plus[c] += h;
    minus[c] -= h;
    auto const vp = profile_at(spec, plus, max_order).values;
    auto const vm = profile_at(spec, minus, max_order).values;
    for (std::size_t r = 0; r < rows; ++r) jac(r, c) = (vp[r] - vm[r]) / (2 * h);
  }
  return jac;
}

std::vector<double> singular_values(Eigen::MatrixXd const& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  auto const& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

int numerical_rank(std::vector<double> const& sv, double rel, double abs) {
  double const top = sv.empty() ? 0.0 : sv.front();
  double const cut = std::max(rel * top, abs);
  return static_cast<int>(std::count_if(sv.begin(), sv.end(),
                                        [&](double s) { return s > cut; }));
}

void check_schema(SignatureSample const& a, SignatureSample const& b) {
  if (a.max_order != b.max_order) {
    throw InputError("profile schema mismatch: max orders " +
                     std::to_string(a.max_order) + " and " +
                     std::to_string(b.max_order));
  }
  if (a.profiles.empty() || b.profiles.empty()) {
    throw InputError("cannot compare an empty signature sample");
  }
  if (a.profiles.front().names != b.profiles.front().names) {
    throw InputError("profile schema mismatch: invariant names differ");
  }
}

}  // namespace

std::vector<std::string> const& profile_names(int order) {
  check_order(order);
  return kNames[order];
}

std::vector<std::string> profile_names_through(int max_order) {
  check_order(max_order);
  std::vector<std::string> out;
  for (int k = 0; k <= max_order; ++k) {
    out.insert(out.end(), kNames[k].begin(), kNames[k].end());
  }
  return out;
}

double InvariantProfile::value(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw std::out_of_range("profile has no invariant " + std::string(name));
}

InvariantProfile profile_at(SubmersionSpec const& spec, std::span<double const> p,
                            int max_order) {
  check_order(max_order);
  InvariantProfile out;
  out.point.assign(p.begin(), p.end());
  out.max_order = max_order;
  out.names = profile_names_through(max_order);
  try {
    require_submersion(spec, p);
    ProfileBuilder b(spec, p, max_order);
    b.order0(out);
    if (max_order >= 1) b.order1(out);
    if (max_order >= 2) b.order2(out);
    if (max_order >= 3) b.order3(out);
  } catch (DomainError const& e) {
    throw DomainError(e.message() + " at point " + format_point(p), e.subexpression());
  }
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!std::isfinite(out.values[i])) {
      throw StructuralError("non-finite " + out.names[i] + " at point " +
                            format_point(p));
    }
  }
  return out;
}

SignatureSample sample_signatures(SubmersionSpec const& spec, Box const& box,
                                  int count, std::uint64_t seed, int max_order,
                                  std::string model) {
  check_order(max_order);
  if (count < 1) throw InputError("sample count must be >= 1");
  if (box.dim() != spec.dim()) {
    throw InputError("sampling box has " + std::to_string(box.dim()) +
                     " coordinates, total chart has " + std::to_string(spec.dim()));
  }
  if (auto const& domain = spec.total().chart().domain()) {
    for (int i = 0; i < box.dim(); ++i) {
      if (box.range(i).lo < domain->range(i).lo || box.range(i).hi > domain->range(i).hi) {
        throw InputError("sampling box leaves the chart domain in coordinate " +
                         spec.total().chart().names()[i]);
      }
    }
  }
  SignatureSample out;
  out.model = std::move(model);
  out.seed = seed;
  out.box = box;
  out.max_order = max_order;
  out.requested = count;
  for (auto const& p : halton_points(box, count, seed)) {
    try {
      out.profiles.push_back(profile_at(spec, p, max_order));
    } catch (StructuralError const& e) {
      ++out.skipped;
      out.skip_reasons.push_back(e.what());
    } catch (DomainError const& e) {
      ++out.skipped;
      out.skip_reasons.push_back(e.what());
    }
  }
  if (2 * out.skipped > count) {
    throw InputError("domain misconfigured: " + std::to_string(out.skipped) + " of " +
                     std::to_string(count) + " sample points failed validation (first: " +
                     out.skip_reasons.front() + ")");
  }
  return out;
}

Genericity genericity_rank(SubmersionSpec const& spec, SignatureSample const& sample,
                           double h, double rel, double abs) {
  Genericity out;
  out.dim = spec.dim();
  if (static_cast<int>(sample.profiles.size()) < out.dim + 1) {
    throw InputError("genericity needs at least " + std::to_string(out.dim + 1) +
                     " sample points, got " + std::to_string(sample.profiles.size()));
  }
  out.rank_by_order.fill(0);
  bool first = true;
  for (auto const& prof : sample.profiles) {
    Eigen::MatrixXd const jac = profile_jacobian(spec, prof.point, sample.max_order, h);
    std::size_t rows = 0;
    for (int k = 0; k <= sample.max_order; ++k) {
      rows += kNames[k].size();
      auto const sv = singular_values(jac.topRows(static_cast<Eigen::Index>(rows)));
      int const r = numerical_rank(sv, rel, abs);
      out.rank_by_order[k] = std::max(out.rank_by_order[k], r);
      if (k == sample.max_order && (first || r > out.rank)) {
        out.rank = r;
        out.singular_values = sv;
        first = false;
      }
    }
  }
  for (int k = sample.max_order + 1; k <= kMaxProfileOrder; ++k) {
    out.rank_by_order[k] = out.rank;
  }
  out.generic = out.rank == out.dim;
  return out;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kDistinct: return "DISTINCT";
    case Verdict::kConsistent: return "CONSISTENT";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

double signature_distance(SignatureSample const& a, SignatureSample const& b,
                          int order) {
  check_schema(a, b);
  check_order(order);
  if (order > a.max_order) throw InputError("order exceeds the sampled max order");
  std::size_t const k = profile_names_through(order).size();
  std::vector<double> scale(k, 1.0);
  for (auto const* s : {&a, &b}) {
    for (auto const& prof : s->profiles) {
      for (std::size_t i = 0; i < k; ++i) {
        scale[i] = std::max(scale[i], std::abs(prof.values[i]));
      }
    }
  }
  auto gap = [&](InvariantProfile const& x, InvariantProfile const& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double const d = (x.values[i] - y.values[i]) / scale[i];
      s += d * d;
    }
    return std::sqrt(s);
  };
  auto directed = [&](SignatureSample const& from, SignatureSample const& to) {
    double worst = 0.0;
    for (auto const& x : from.profiles) {
      double best = std::numeric_limits<double>::infinity();
      for (auto const& y : to.profiles) best = std::min(best, gap(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

Comparison compare(SignatureSample const& a, Genericity const& ga,
                   SignatureSample const& b, Genericity const& gb, double tol_rel) {
  check_schema(a, b);
  if (!(tol_rel > 0.0)) throw InputError("relative tolerance must be > 0");
  Comparison out;
  out.rank_a = ga.rank;
  out.rank_b = gb.rank;

  auto const names = profile_names_through(a.max_order);
  std::vector<double> gaps;
  for (std::size_t i = 0; i < names.size(); ++i) {
    InvariantEvidence e;
    e.name = names[i];
    e.min_a = e.min_b = std::numeric_limits<double>::infinity();
    e.max_a = e.max_b = -std::numeric_limits<double>::infinity();
    for (auto const& p : a.profiles) {
      e.min_a = std::min(e.min_a, p.values[i]);
      e.max_a = std::max(e.max_a, p.values[i]);
    }
    for (auto const& p : b.profiles) {
      e.min_b = std::min(e.min_b, p.values[i]);
      e.max_b = std::max(e.max_b, p.values[i]);
    }
    e.scale = std::max({1.0, std::abs(e.min_a), std::abs(e.max_a), std::abs(e.min_b),
                        std::abs(e.max_b)});
    gaps.push_back(std::max(std::abs(e.min_a - e.min_b), std::abs(e.max_a - e.max_b)) /
                   e.scale);
    out.evidence.push_back(std::move(e));
  }

  for (int k = 0; k <= a.max_order; ++k) {
    OrderStep step;
    step.order = k;
    step.distance = signature_distance(a, b, k);
    bool const generic = ga.rank_by_order[k] == ga.dim && gb.rank_by_order[k] == gb.dim;
    if (step.distance > 10.0 * tol_rel) {
      step.verdict = Verdict::kDistinct;
    } else if (step.distance <= tol_rel && generic) {
      step.verdict = Verdict::kConsistent;
    } else {
      step.verdict = Verdict::kInconclusive;
    }
    out.steps.push_back(step);
    out.verdict = step.verdict;
    out.distance = step.distance;
    out.order = k;
    if (step.verdict == Verdict::kDistinct) break;
  }
  std::size_t const reached = profile_names_through(out.order).size();
  auto const worst = std::max_element(gaps.begin(), gaps.begin() + reached);
  out.worst_invariant = names[worst - gaps.begin()];
  for (std::size_t i = 0; i < reached; ++i) {
    if (gaps[i] > 10.0 * tol_rel) out.separating.push_back(names[i]);
  }

  switch (out.verdict) {
    case Verdict::kDistinct:
      out.note = "signature clouds differ at order " + std::to_string(out.order) +
                 "; the submersions are not locally equivalent on the sampled regions";
      break;
    case Verdict::kConsistent:
      out.note = "signatures agree on the generic stratum up to order " +
                 std::to_string(out.order) + "; this is evidence, not a proof of equivalence";
      break;
    case Verdict::kInconclusive:
      if (!ga.generic || !gb.generic) {
        out.note = "nongeneric stratum (signature rank " + std::to_string(ga.rank) + " and " +
                   std::to_string(gb.rank) + "); finite-order invariants cannot decide";
      } else {
        out.note = "signature distance between tolerance and 10x tolerance";
      }
      break;
  }
  return out;
}

}  // namespace oneill
