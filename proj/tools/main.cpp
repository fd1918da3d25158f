#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "oneill/commands.hpp"
#include "oneill/errors.hpp"

namespace {

using namespace oneill;

struct Args {
  std::string scenario, scenario_b, candidates, out, path;
  std::optional<int> max_order, samples;
  std::optional<std::uint64_t> seed;
};

Overrides overrides(Args const& a, int base_dim) {
  Overrides o;
  o.max_order = a.max_order;
  o.samples = a.samples;
  o.seed = a.seed;
  if (!a.path.empty()) o.path = parse_path(a.path, base_dim);
  return o;
}

Scenario load(std::string const& file, Args const& a) {
  Scenario s = load_scenario(file);
  apply_overrides(s, overrides(a, s.spec.base_dim()));
  return s;
}

CommandResult dispatch(std::string const& command, Args const& a) {
  if (command == "profile") return run_profile(load(a.scenario, a));
  if (command == "verify") return run_verify(load(a.scenario, a));
  if (command == "reconstruct") return run_reconstruct(load(a.scenario, a));
  if (a.scenario_b.empty()) throw InputError(command + " needs --scenario-b");
  Scenario const sa = load(a.scenario, a);
  Scenario const sb = load(a.scenario_b, a);
  if (command == "compare") return run_compare(sa, sb);
  if (a.candidates.empty()) throw InputError("equivalence needs --candidates");
  Json const doc = read_json_file(a.candidates);
  Candidates cand;
  try {
    cand = parse_candidates(doc, sa, sb);
  } catch (InputError const& e) {
    throw InputError(a.candidates + ": " + e.what());
  }
  return run_equivalence(sa, sb, cand);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian submersion invariants: profiles, comparison, identity checks"};
  app.require_subcommand(1);
  Args args;
  auto add_common = [&](CLI::App* sub, bool pair, bool candidates) {
    sub->add_option("--scenario", args.scenario, "scenario JSON file")->required();
    if (pair) sub->add_option("--scenario-b", args.scenario_b, "second scenario JSON file")->required();
    if (candidates) {
      sub->add_option("--candidates", args.candidates, "candidate maps JSON file")->required();
    }
    sub->add_option("--out", args.out, "report file (default stdout)");
    sub->add_option("--max-order", args.max_order, "highest invariant order")->check(CLI::Range(0, 3));
    sub->add_option("--seed", args.seed, "sampling seed");
    sub->add_option("--samples", args.samples, "sample count")->check(CLI::PositiveNumber);
  };
  add_common(app.add_subcommand("profile", "sample the invariant profile"), false, false);
  add_common(app.add_subcommand("compare", "compare two signature clouds"), true, false);
  add_common(app.add_subcommand("verify", "check O'Neill identities and closed forms"), false, false);
  add_common(app.add_subcommand("equivalence", "check candidate equivalence maps"), true, true);
  auto* rec = app.add_subcommand("reconstruct", "recover ln f from the mean curvature");
  add_common(rec, false, false);
  rec->add_option("--path", args.path, "base polyline \"x0,y0;x1,y1;...\"");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  std::string const command = app.get_subcommands().front()->get_name();

  try {
    auto const start = std::chrono::steady_clock::now();
    CommandResult result = dispatch(command, args);
    std::chrono::duration<double> const elapsed = std::chrono::steady_clock::now() - start;
    result.report["timing"] = {{"seconds", elapsed.count()}};
    std::string const text = result.report.dump(2) + "\n";
    if (args.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(args.out);
      if (!out || !(out << text)) throw InputError("cannot write " + args.out);
    }
    return result.exit_code;
  } catch (InputError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (StructuralError const& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (DomainError const& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (std::exception const& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
