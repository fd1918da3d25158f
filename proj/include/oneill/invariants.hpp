#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oneill/geometry.hpp"
#include "oneill/submersion.hpp"

namespace oneill {

inline constexpr std::string_view kProfileSchema = "profile-v1";
inline constexpr int kMaxProfileOrder = 3;

// profile-v1 names grouped by differential order.
std::vector<std::string> const& profile_names(int order);
// All names of orders 0..max_order in report order.
std::vector<std::string> profile_names_through(int max_order);

struct InvariantProfile {
  Point point;
  int max_order = 0;
  std::vector<std::string> names;
  std::vector<double> values;

  double value(std::string_view name) const;
};

// A2 = |A|^2, T2 = |T|^2 as frame sums, H2 = |H|^2; derivative scalars are
// full g-norms of covariant derivatives of the extended tensors. divH uses the
// total-space connection. mixAR = |nabla_H A|^2, mixTR = |nabla_H T|^2.
InvariantProfile profile_at(SubmersionSpec const& spec, std::span<double const> p,
                            int max_order);

struct SignatureSample {
  std::string model;
  std::uint64_t seed = 0;
  Box box;
  int max_order = 0;
  int requested = 0;
  int skipped = 0;
  std::vector<std::string> skip_reasons;
  std::vector<InvariantProfile> profiles;
};

// Halton points in `box`; points where the submersion or an expression fails
// are skipped. Throws InputError when more than half are skipped.
SignatureSample sample_signatures(SubmersionSpec const& spec, Box const& box,
                                  int count, std::uint64_t seed, int max_order,
                                  std::string model = {});

struct Genericity {
  int dim = 0;
  // Max over points of the numerical rank of d(profile)/dx, per order prefix.
  std::array<int, kMaxProfileOrder + 1> rank_by_order{};
  int rank = 0;                          // at the sample's max order
  std::vector<double> singular_values;   // at the point attaining `rank`
  bool generic = false;                  // rank == dim
};

// Central differences of the profile in each coordinate (step h) at every
// sample point. Singular values count when above max(rel * sigma_max, abs).
Genericity genericity_rank(SubmersionSpec const& spec, SignatureSample const& sample,
                           double h = 1e-4, double rel = 1e-6, double abs = 1e-6);

enum class Verdict { kDistinct, kConsistent, kInconclusive };
std::string_view verdict_name(Verdict v);

struct InvariantEvidence {
  std::string name;
  double min_a = 0.0, max_a = 0.0;
  double min_b = 0.0, max_b = 0.0;
  double scale = 1.0;
};

struct OrderStep {
  int order = 0;
  double distance = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

struct Comparison {
  Verdict verdict = Verdict::kInconclusive;
  double distance = 0.0;
  int order = 0;  // order at which the verdict was reached
  std::vector<OrderStep> steps;
  std::vector<InvariantEvidence> evidence;
  std::string worst_invariant;  // largest normalized range gap
  // Invariants up to `order` whose normalized range gap exceeds 10 tol_rel.
  std::vector<std::string> separating;
  int rank_a = 0;
  int rank_b = 0;
  std::string note;
};

// Symmetric Hausdorff distance between the normalized signature clouds,
// restricted to invariants of order <= `order`.
double signature_distance(SignatureSample const& a, SignatureSample const& b,
                          int order);

// Runs orders 0..max_order and stops at the first DISTINCT.
Comparison compare(SignatureSample const& a, Genericity const& ga,
                   SignatureSample const& b, Genericity const& gb, double tol_rel);

}  // namespace oneill
