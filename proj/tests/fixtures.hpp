#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "oneill/geometry.hpp"
#include "oneill/models.hpp"

namespace oneill::fixtures {

inline MetricField metric(std::vector<std::string> names,
                          std::vector<std::vector<std::string>> const& rows,
                          std::optional<Box> box = std::nullopt) {
  std::vector<std::vector<Expr>> c;
  for (auto const& row : rows) {
    auto& out = c.emplace_back();
    for (auto const& s : row) out.push_back(parse(s, names));
  }
  return MetricField(Chart(std::move(names), std::move(box)), std::move(c));
}

inline MetricField line(std::string name, double lo, double hi) {
  return metric({std::move(name)}, {{"1"}}, Box({{lo, hi}}));
}

inline MetricField flat_plane(std::string a, std::string b) {
  return metric({std::move(a), std::move(b)}, {{"1", "0"}, {"0", "1"}},
                Box({{-1, 1}, {-1, 1}}));
}

inline MetricField round_sphere() {
  return metric({"th", "ph"}, {{"1", "0"}, {"0", "sin(th)^2"}},
                Box({{0.3, M_PI - 0.3}, {-3, 3}}));
}

inline WarpedProductSpec warped(std::string f, int m = 1, double lo = -1,
                                double hi = 1) {
  MetricField fiber = m == 1 ? line("y", -1, 1) : flat_plane("y", "z");
  MetricField base = line("x", lo, hi);
  return {base, fiber, parse(f, {"x"})};
}

inline KillingOrbitSpec killing(std::string phi, std::string a0,
                                std::string a1) {
  std::vector<std::string> const xy{"x", "y"};
  return {flat_plane("x", "y"), parse(phi, xy), {parse(a0, xy), parse(a1, xy)}};
}

inline KillingOrbitSpec hopf_killing() {
  std::vector<std::string> const names{"eta", "psi"};
  MetricField base = metric(names, {{"1", "0"}, {"0", "sin(eta)^2*cos(eta)^2"}},
                            Box({{0.1, M_PI / 2 - 0.1}, {-3, 3}}));
  return {base, parse("1", names),
          {parse("0", names), parse("-cos(2*eta)/2", names)}};
}

struct Named {
  std::string name;
  SubmersionSpec spec;
};

// Every builtin model family with representative parameters.
inline std::vector<Named> all_models() {
  return {
      {"product R x R", build_product(line("x", -1, 1), line("y", -1, 1))},
      {"product R x S1", build_product(line("x", -1, 1), line("s", -3, 3))},
      {"product R x S2", build_product(line("x", -1, 1), round_sphere())},
      {"warped e^x", build_warped(warped("exp(x)"))},
      {"warped e^x m=2", build_warped(warped("exp(x)", 2))},
      {"warped e^(x^2)", build_warped(warped("exp(x^2)", 1, 0.5, 1.5))},
      {"hopf", build_hopf()},
      {"killing", build_killing_total(killing("exp(x)", "0", "x")).spec},
      {"killing hopf data", build_killing_total(hopf_killing()).spec},
      {"killing lumpy",
       build_killing_total(killing("1 + 0.3*x^2 + 0.1*y", "sin(y)", "x*y")).spec},
  };
}

inline std::vector<Point> samples(SubmersionSpec const& spec, int count,
                                  std::uint64_t seed = 0) {
  return halton_points(*spec.total().chart().domain(), count, seed);
}

}  // namespace oneill::fixtures
