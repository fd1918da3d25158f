#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "oneill/geometry.hpp"
#include "oneill/models.hpp"
#include "oneill/submersion.hpp"

namespace oneill {

using Json = nlohmann::ordered_json;

enum class ModelKind { kExplicit, kProduct, kWarped, kHopf, kKilling };

struct ScenarioTolerances {
  double structural = 1e-8;
  double identity = 1e-7;
  double orthonormality = 1e-10;
  double closed_form = 1e-8;
  double equivalence = 1e-8;
  double compare_rel = 1e-6;
  double reconstruct = 1e-5;

  Tolerances submersion() const { return {structural, identity, orthonormality}; }
};

struct Scenario {
  std::string name;
  ModelKind kind = ModelKind::kExplicit;
  SubmersionSpec spec;
  std::optional<WarpedProductSpec> warped;    // product and warped models
  std::optional<KillingOrbitSpec> killing;    // killing models
  std::vector<Expr> killing_field;            // empty unless known
  Box box;
  int samples = 32;
  std::uint64_t seed = 0;
  int max_order = 2;
  ScenarioTolerances tol;
  std::vector<Point> path;  // base polyline for reconstruct
  Json echo;                // the scenario document as read
};

// Field paths in messages look like "model.params.f".
Scenario parse_scenario(Json const& doc);
// Reads and parses; JSON syntax errors carry line and column.
Scenario load_scenario(std::filesystem::path const& file);
Json read_json_file(std::filesystem::path const& file);

std::string_view model_kind_name(ModelKind kind);

// Candidate data for equivalence: phi over A's total chart, psi over A's
// base chart, fiber_isometry over A's fiber coordinates.
struct Candidates {
  std::vector<Expr> phi;
  std::vector<Expr> psi;
  std::optional<double> c;
  std::optional<std::vector<Expr>> fiber_isometry;
  Json echo;
};

Candidates parse_candidates(Json const& doc, Scenario const& a, Scenario const& b);

// "x0,y0;x1,y1;..." into base points.
std::vector<Point> parse_path(std::string const& text, int base_dim);

}  // namespace oneill
