// dofforge: synthesize plan libraries, solve scenes, verify solutions.
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "dofforge/io.hpp"
#include "dofforge/reformulate.hpp"
#include "dofforge/runtime.hpp"
#include "dofforge/verify.hpp"

using namespace dofforge;

namespace {

enum Exit {
  kOk = 0,
  kRules = 1,
  kUnsolved = 2,
  kMissingFragment = 3,
  kDiagnostic = 4,
  kVerify = 5,
  kInput = 6,
};

std::vector<GeomKind> kinds_of(const std::string& g) {
  if (g == "all") return {GeomKind::Circle, GeomKind::LineSegment};
  return {parse_geom_kind(g)};
}

RuleBase rules_from(const std::string& path, const std::vector<std::string>& without) {
  RuleBase rb = path.empty() ? default_rule_base() : load_rule_base(path);
  for (const auto& w : without) rb = rb.without(w);
  return rb;
}

struct SynthOpts {
  std::string geom = "circle", rules, out, spec;
  int depth = 6, jobs = 1, alternative = 0;
  std::vector<std::string> without;
};

int synthesize(const SynthOpts& o) {
  const RuleBase rb = rules_from(o.rules, o.without);
  SearchConfig cfg;
  cfg.max_depth = o.depth;
  if (!o.spec.empty()) {
    const PlanSpec spec = spec_from_json(read_json_file(o.spec));
    try {
      const SpecReport rep = synthesize_spec(spec, rb, cfg);
      std::cout << rep.text();
      if (!o.out.empty()) write_file_atomic(o.out, rep.text());
      return rep.reduced.empty() ? kUnsolved : kOk;
    } catch (const DepthExceeded& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUnsolved;
    }
  }
  const LibrarySynthesis lib = synthesize_library(kinds_of(o.geom), rb, cfg, o.alternative, o.jobs);
  std::cout << lib.summary();
  if (!o.out.empty()) write_file_atomic(o.out, library_to_json(lib.library).dump(2) + "\n");
  for (const auto& s : lib.missing()) std::cerr << "missing rules? no plan for " << to_string(s) << "\n";
  return lib.missing().empty() ? kOk : kUnsolved;
}

struct SolveOpts {
  std::string scene, out, svg, explain, rules;
  std::vector<std::string> plans;
};

int solve(const SolveOpts& o) {
  const Scene scene = scene_from_json(read_json_file(o.scene));
  PlanLibrary lib;
  for (const auto& p : o.plans) lib.merge(library_from_json(read_json_file(p)));
  const RuleBase rb = rules_from(o.rules, {});
  SolveResult r;
  try {
    r = solve_scene(scene, lib, rb);
  } catch (const MissingPlanFragment& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMissingFragment;
  } catch (const Diagnostic& d) {
    std::cerr << "diagnostic: " << d.what() << "\n";
    return kDiagnostic;
  }
  const std::string doc = scene_to_json(r.scene).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << doc;
  } else {
    write_file_atomic(o.out, doc);
  }
  if (!o.svg.empty()) write_file_atomic(o.svg, render_svg(scene, r.scene, chosen_points(r.traces)));
  if (!o.explain.empty()) write_file_atomic(o.explain, explain_traces(r.traces, lib));
  return kOk;
}

int verify(const std::string& path, double tol) {
  const VerifyReport rep = verify_scene(scene_from_json(read_json_file(path)), tol);
  std::cout << rep.table();
  return rep.pass() ? kOk : kVerify;
}

int signatures(const std::string& geom, bool raw, const std::string& rules) {
  const RuleBase rb = rules_from(rules, {});
  for (auto k : kinds_of(geom)) {
    const SignatureScheme s = derive_signature_scheme(k, rb);
    if (raw) {
      for (const auto& e : s.entries) {
        std::cout << to_string(e.raw) << "  ->  "
                  << (e.over_constrained ? std::string("over-constrained") : to_string(e.canonical)) << "\n";
      }
      std::cout << s.entries.size() << " raw " << to_string(k) << " signatures\n";
    } else {
      for (const auto& c : s.canonical) std::cout << to_string(c) << "\n";
      std::cout << s.canonical.size() << " canonical " << to_string(k) << " signatures\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan-fragment synthesis and incremental solving for 2D geometric constraints"};
  app.require_subcommand(1);

  SynthOpts so;
  auto* syn = app.add_subcommand("synthesize", "Build a plan library, or plan one explicit spec");
  syn->add_option("--geom", so.geom, "circle, line-segment or all")
      ->check(CLI::IsMember({"circle", "line-segment", "all"}));
  syn->add_option("--rules", so.rules, "Rule base file (default: built in)");
  syn->add_option("--out", so.out, "Where to write the library (or the spec report)");
  syn->add_option("--depth", so.depth, "Phase I depth limit")->check(CLI::NonNegativeNumber);
  syn->add_option("--jobs", so.jobs, "Parallel signatures")->check(CLI::PositiveNumber);
  syn->add_option("--alternative", so.alternative, "Use the K-th ranked plan (clamped)")->check(CLI::NonNegativeNumber);
  syn->add_option("--without-rule", so.without, "Drop a rule (or rule family) before synthesis");
  syn->add_option("--spec", so.spec, "Plan one JSON spec instead of the whole signature scheme");

  SolveOpts vo;
  auto* sol = app.add_subcommand("solve", "Satisfy a scene's constraints in order");
  sol->add_option("scene", vo.scene, "Scene JSON")->required();
  sol->add_option("--plans", vo.plans, "Plan library JSON (repeatable)")->required();
  sol->add_option("--out", vo.out, "Solved scene (default: stdout)");
  sol->add_option("--svg", vo.svg, "Render initial and solved scene");
  sol->add_option("--explain", vo.explain, "Write the execution trace");
  sol->add_option("--rules", vo.rules, "Rule base file (default: built in)");

  std::string vpath;
  double tol = 1e-9;
  auto* ver = app.add_subcommand("verify", "Check every constraint of a solved scene");
  ver->add_option("scene", vpath, "Solved scene JSON")->required();
  ver->add_option("--tol", tol, "Residual tolerance");

  std::string sgeom = "circle", srules;
  bool raw = false;
  auto* sig = app.add_subcommand("signatures", "List the signature scheme");
  sig->add_option("--geom", sgeom, "circle, line-segment or all")
      ->check(CLI::IsMember({"circle", "line-segment", "all"}));
  sig->add_flag("--raw", raw, "All raw signatures with their canonical form");
  sig->add_option("--rules", srules, "Rule base file (default: built in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  try {
    if (*syn) return synthesize(so);
    if (*sol) return solve(vo);
    if (*ver) return verify(vpath, tol);
    if (*sig) return signatures(sgeom, raw, srules);
  } catch (const ParseError& e) {
    std::cerr << "rule base: " << e.what() << "\n";
    return kRules;
  } catch (const SchemaError& e) {
    std::cerr << "input: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kOk;
}
