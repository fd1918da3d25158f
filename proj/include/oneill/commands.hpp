#pragma once

#include <optional>

#include "oneill/scenario.hpp"

namespace oneill {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;  // FAIL or DISTINCT, still a valid run
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

struct Overrides {
  std::optional<int> max_order;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<Point>> path;
};

void apply_overrides(Scenario& s, Overrides const& o);

struct CommandResult {
  Json report;
  int exit_code = kExitOk;
};

// Reports carry no timing; the CLI adds it.
CommandResult run_profile(Scenario const& s);
CommandResult run_compare(Scenario const& a, Scenario const& b);
CommandResult run_verify(Scenario const& s);
CommandResult run_equivalence(Scenario const& a, Scenario const& b,
                              Candidates const& candidates);
CommandResult run_reconstruct(Scenario const& s);

}  // namespace oneill
