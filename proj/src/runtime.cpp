#include "dofforge/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace dofforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Run {
  GeomState state;
  std::map<std::string, Value> locals;
  double motion = 0.0;
  ExecutionTrace* trace = nullptr;  // null while simulating a candidate
  const std::vector<Value>* replay = nullptr;
  size_t replay_pos = 0;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n < 2) return {lo};
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

class Executor {
 public:
  Executor(const Scene& scene, const ExecConfig& cfg)
      : scene_(scene), cfg_(cfg), box_(scene.bbox().inflated(cfg.inflate)) {}

  void exec(const std::vector<Step>& body, Run& r) const {
    for (const auto& s : body) {
      switch (s.kind) {
        case Step::Kind::Bind: {
          Value v = eval_expr(s.expr, ctx(r));
          if (r.trace) r.trace->events.push_back({s.kind, s.local, s.expr.str(), v, 0.0});
          r.locals[s.local] = std::move(v);
          break;
        }
        case Step::Kind::Apply: apply(s.expr, r); break;
        case Step::Kind::Abort:
          if (r.trace) r.trace->events.push_back({s.kind, "", s.message, std::nullopt, 0.0});
          throw Diagnostic("plan", s.message);
        case Step::Kind::Case: {
          const Value& v = r.locals.at(s.local);
          const auto tag = v.kind() == Value::Kind::Isect ? v.isect().tag : IntersectionResult::Tag::Points;
          const char* arm = tag == IntersectionResult::Tag::Points       ? "points"
                            : tag == IntersectionResult::Tag::Coincident ? "coincident"
                                                                         : "empty";
          if (r.trace) r.trace->events.push_back({s.kind, s.local, arm, v, 0.0});
          exec(tag == IntersectionResult::Tag::Points       ? s.body
               : tag == IntersectionResult::Tag::Coincident ? s.coincident
                                                            : s.empty,
               r);
          return;  // the arms carry the rest of the plan
        }
        case Step::Kind::ForMin: for_min(s, r); return;
      }
    }
  }

 private:
  EvalContext ctx(const Run& r) const {
    EvalContext c;
    c.scene = &scene_;
    c.geom = &r.state;
    c.geom_sym = "$" + r.state.name;
    c.locals = r.locals;
    c.tol = scene_.tol;
    return c;
  }

  void apply(const Term& action, Run& r) const {
    const EvalContext c = ctx(r);
    if (!action.is_app() || action.arity() < 2 || !action.arg(0).is_sym(c.geom_sym)) {
      throw TypeMismatch("not an action on " + c.geom_sym + ": " + action.str());
    }
    GroundAction a;
    if (action.is_app("translate")) {
      a = GroundAction::translate(eval_expr(action.arg(1), c).vec());
    } else if (action.is_app("rotate")) {
      a = GroundAction::rotate(eval_expr(action.arg(1), c).point(), eval_expr(action.arg(3), c).scalar());
    } else if (action.is_app("scale")) {
      a = GroundAction::scale(eval_expr(action.arg(1), c).point(), eval_expr(action.arg(2), c).scalar());
    } else {
      throw TypeMismatch("unknown action " + action.str());
    }
    GeomState after;
    try {
      after = apply_action(r.state, a, scene_.tol);
    } catch (const NonPositiveDimension& e) {
      throw Diagnostic(action.name(), e.what());
    }
    r.motion += cfg_.motion.cost(r.state, a, after);
    if (r.trace) r.trace->events.push_back({Step::Kind::Apply, "", describe(a), std::nullopt, 0.0});
    r.state = std::move(after);
  }

  struct Domain {
    std::optional<Locus1d> locus;  // parametric over t
    bool scalar = false;           // t itself
    std::vector<double> ts;
    std::vector<Value> finite;
    size_t initial = 0;

    Value at(double t) const { return locus ? Value::of(locus->point_at(t)) : Value::of(t); }
  };

  Domain domain_of(const Step& s, const Run& r) const {
    Domain d;
    if (s.domain != Step::Domain::Points) {
      const double span = s.domain == Step::Domain::Amount ? box_.diagonal() : std::numbers::pi;
      d.scalar = true;
      d.ts = linspace(-span, span, cfg_.samples);
      d.ts.push_back(0.0);
      std::sort(d.ts.begin(), d.ts.end());
      d.initial = static_cast<size_t>(std::find(d.ts.begin(), d.ts.end(), 0.0) - d.ts.begin());
      return d;
    }
    const Value src = eval_expr(s.expr, ctx(r));
    if (src.kind() == Value::Kind::Vec) {
      d.finite = {src};
    } else if (src.kind() == Value::Kind::Isect && src.isect().tag == IntersectionResult::Tag::Points) {
      for (const auto& p : src.isect().points) d.finite.push_back(Value::of(p));
    } else {
      d.locus = src.locus();
      // the bounds also reach the locus points nearest the geom, so the
      // least-motion candidate is never clipped away
      BBox box = box_;
      const double hw = 0.5 * (box_.xmax - box_.xmin), hh = 0.5 * (box_.ymax - box_.ymin);
      const std::vector<Point2> anchors = r.state.kind == GeomKind::Circle
                                              ? std::vector<Point2>{r.state.center}
                                              : std::vector<Point2>{r.state.end1, r.state.end2};
      for (const auto& a : anchors) {
        const Point2 q = closest_point(*d.locus, a).second;
        box.include({q.x - hw, q.y - hh});
        box.include({q.x + hw, q.y + hh});
      }
      d.ts = discretize(*d.locus, box, cfg_.samples);
      if (d.ts.empty()) throw Diagnostic("for-min", "locus of ?" + s.local + " misses the scene bounds");
    }
    return d;
  }

  void for_min(const Step& s, Run& r) const {
    Value chosen;
    double objective = 0.0;
    if (r.replay) {
      if (r.replay_pos >= r.replay->size()) throw DofError("replay has fewer choices than the plan");
      chosen = (*r.replay)[r.replay_pos++];
    } else {
      std::string first_error;
      auto cost = [&](const Value& v) {
        Run sim;
        sim.state = r.state;
        sim.locals = r.locals;
        sim.locals[s.local] = v;
        try {
          exec(s.body, sim);
          return sim.motion;
        } catch (const DofError& e) {
          if (first_error.empty()) first_error = e.what();
        } catch (const GeometryError& e) {
          if (first_error.empty()) first_error = e.what();
        }
        return kInf;
      };
      const Domain d = domain_of(s, r);
      if (!d.finite.empty()) {
        std::vector<double> vals;
        for (const auto& v : d.finite) vals.push_back(cost(v));
        const auto w = least_motion_search({vals.size()}, [&](const std::vector<size_t>& i) { return vals[i[0]]; },
                                           cfg_.max_passes)[0];
        chosen = d.finite[w];
        objective = vals[w];
      } else {
        std::vector<double> ts = d.ts;
        std::vector<double> vals(ts.size(), std::nan(""));
        auto obj = [&](const std::vector<size_t>& i) {
          if (std::isnan(vals[i[0]])) vals[i[0]] = cost(d.at(ts[i[0]]));
          return vals[i[0]];
        };
        size_t w = least_motion_search({ts.size()}, obj, cfg_.max_passes, {d.initial})[0];
        double best_t = ts[w];
        objective = obj({w});
        // refine around the winner on successively finer grids
        for (int pass = 0; pass < cfg_.refine_passes && std::isfinite(objective); ++pass) {
          const double lo = ts[w > 0 ? w - 1 : w], hi = ts[w + 1 < ts.size() ? w + 1 : w];
          if (!(hi > lo)) break;
          ts = linspace(lo, hi, 2 * cfg_.refine_factor + 1);
          vals.assign(ts.size(), std::nan(""));
          const size_t centre = static_cast<size_t>(std::min_element(ts.begin(), ts.end(), [&](double a, double b) {
                                                      return std::abs(a - best_t) < std::abs(b - best_t);
                                                    }) - ts.begin());
          w = least_motion_search({ts.size()}, obj, cfg_.max_passes, {centre})[0];
          if (obj({w}) < objective) {
            objective = obj({w});
            best_t = ts[w];
          }
        }
        chosen = d.at(best_t);
      }
      if (!std::isfinite(objective)) {
        throw Diagnostic("for-min", "no feasible candidate for ?" + s.local +
                                        (first_error.empty() ? std::string() : " (" + first_error + ")"));
      }
    }
    r.locals[s.local] = chosen;
    if (r.trace) {
      r.trace->choices.push_back(chosen);
      r.trace->events.push_back({Step::Kind::ForMin, s.local, to_string(s.domain), chosen, objective});
    }
    exec(s.body, r);
  }

  const Scene& scene_;
  const ExecConfig& cfg_;
  BBox box_;
};

std::vector<std::string> pattern_params(const std::vector<Term>& pattern, const std::string& geom) {
  std::set<std::string> syms;
  auto walk = [&](auto&& self, const Term& t) -> void {
    if (t.is_sym() && t.name().size() > 1 && t.name()[0] == '$') syms.insert(t.name());
    if (t.is_app()) {
      for (const auto& a : t.args()) self(self, a);
    }
  };
  for (const auto& p : pattern) walk(walk, p);
  std::vector<std::string> out{geom};
  for (const auto& s : syms) {
    if (s != geom) out.push_back(s);
  }
  return out;
}

bool match_multiset(const std::vector<Term>& pats, const std::vector<Term>& invs, size_t i, std::vector<bool>& used,
                    Subst& s) {
  if (i == pats.size()) return true;
  for (size_t j = 0; j < invs.size(); ++j) {
    if (used[j]) continue;
    Subst next = s;
    if (!match(pats[i], invs[j], next)) continue;
    used[j] = true;
    if (match_multiset(pats, invs, i + 1, used, next)) {
      s = std::move(next);
      return true;
    }
    used[j] = false;
  }
  return false;
}

}  // namespace

ExecResult execute_body(const std::vector<Step>& body, const Scene& scene, const GeomState& geom,
                        const ExecConfig& cfg, const std::vector<Value>* replay) {
  ExecResult out;
  Run r;
  r.state = geom;
  r.trace = &out.trace;
  r.replay = replay;
  Executor(scene, cfg).exec(body, r);
  out.state = std::move(r.state);
  out.trace.motion = r.motion;
  return out;
}

std::optional<std::map<std::string, Term>> bind_pattern(const PlanFragment& frag, const std::vector<Term>& invariants) {
  if (frag.pattern.size() != invariants.size()) return std::nullopt;
  std::map<std::string, Term> to_var;
  for (const auto& p : frag.params) to_var[p] = Term::var("P" + p.substr(1));
  std::vector<Term> pats;
  for (const auto& p : frag.pattern) pats.push_back(replace_sym(p, to_var));
  std::vector<bool> used(invariants.size(), false);
  Subst s;
  if (!match_multiset(pats, invariants, 0, used, s)) return std::nullopt;
  std::map<std::string, Term> table;
  for (const auto& p : frag.params) table[p] = substitute(s, to_var[p]);
  return table;
}

std::vector<Step> instantiate(const std::vector<Step>& body, const std::map<std::string, Term>& table) {
  std::vector<Step> out = body;
  for (auto& s : out) {
    s.expr = replace_sym(s.expr, table);
    s.body = instantiate(s.body, table);
    s.coincident = instantiate(s.coincident, table);
    s.empty = instantiate(s.empty, table);
  }
  return out;
}

ExecResult execute_plan(const PlanFragment& frag, const Scene& scene, const GeomState& geom,
                        const std::vector<Term>& invariants, const ExecConfig& cfg, const std::vector<Value>* replay) {
  auto table = bind_pattern(frag, invariants);
  if (!table) throw DofError("fragment " + to_string(frag.signature) + " does not match " + join_terms(invariants));
  return execute_body(instantiate(frag.body, *table), scene, geom, cfg, replay);
}

const PlanFragment* PlanLibrary::find(const Signature& s) const {
  for (const auto& f : fragments) {
    if (f.signature == s) return &f;
  }
  return nullptr;
}

void PlanLibrary::merge(const PlanLibrary& other) {
  for (const auto& f : other.fragments) {
    if (!find(f.signature)) fragments.push_back(f);
  }
  if (geom_kind.empty()) {
    geom_kind = other.geom_kind;
    rulebase_hash = other.rulebase_hash;
    depth = other.depth;
    alternative = other.alternative;
  } else if (geom_kind != other.geom_kind) {
    geom_kind = "all";
  }
}

namespace {

std::vector<std::vector<Term>> reduce_plans(const SearchResult& r, const RuleBase& rb) {
  std::vector<std::vector<Term>> out;
  std::set<std::string> seen;
  for (const auto& p : r.plans) {
    auto e = eliminate_redundant(p.steps, r.spec.kind, r.spec.geom, r.root_preserved, rb);
    if (seen.insert(join_terms(e)).second) out.push_back(std::move(e));
  }
  return prioritize(out, rb);
}

}  // namespace

SynthesisOutcome synthesize_fragment(const Signature& sig, const RuleBase& rb, const SearchConfig& cfg,
                                     int alternative) {
  SynthesisOutcome o;
  o.signature = sig;
  if (cfg.max_depth <= 0) {
    o.status = SynthesisStatus::MissingRules;
    o.depth_exceeded = true;
    return o;
  }
  PlanSpec spec;
  spec.kind = sig.kind;
  spec.geom = "$g";
  spec.tba = representative(sig, spec.geom, true);
  SearchResult r;
  try {
    r = synthesize_skeletal(spec, rb, cfg);
  } catch (const DepthExceeded& e) {
    o.status = SynthesisStatus::MissingRules;
    o.depth_exceeded = true;
    o.explanation = e.what();
    return o;
  }
  o.skeletal = static_cast<int>(r.plans.size());
  std::vector<std::vector<Step>> bodies;
  for (auto& p : reduce_plans(r, rb)) {
    try {
      bodies.push_back(elaborate(p));
      o.ranked.push_back(std::move(p));
    } catch (const DofError&) {
      // a free parameter the executor cannot sample; the plan is dropped
    }
  }
  if (o.ranked.empty()) {
    o.status = SynthesisStatus::MissingRules;
    o.explanation = "search exhausted without a plan";
    return o;
  }
  const size_t k = std::min<size_t>(static_cast<size_t>(std::max(alternative, 0)), o.ranked.size() - 1);
  PlanFragment f;
  f.signature = sig;
  for (const auto& t : spec.tba) f.pattern.push_back(canonical_term(t));
  std::sort(f.pattern.begin(), f.pattern.end());
  f.params = pattern_params(f.pattern, spec.geom);
  f.steps = o.ranked[k];
  f.body = bodies[k];
  o.fragment = std::move(f);
  return o;
}

int LibrarySynthesis::solved() const {
  int n = 0;
  for (const auto& o : outcomes) n += o.status == SynthesisStatus::Solved;
  return n;
}

std::vector<Signature> LibrarySynthesis::missing() const {
  std::vector<Signature> out;
  for (const auto& o : outcomes) {
    if (o.status == SynthesisStatus::MissingRules) out.push_back(o.signature);
  }
  return out;
}

std::string LibrarySynthesis::summary() const {
  std::ostringstream os;
  os << "raw signatures:        " << raw << "\n";
  os << "over-constrained:      " << over_constrained << " (no solution exists)\n";
  os << "canonical signatures:  " << outcomes.size() << "\n";
  os << "solved:                " << solved() << "/" << outcomes.size() << "\n";
  os << "missing-rule suspects: " << missing().size() << "\n";
  for (const auto& o : outcomes) {
    os << "  " << to_string(o.signature) << "  ";
    if (o.status == SynthesisStatus::Solved) {
      os << "solved (" << o.skeletal << " skeletal, " << o.ranked.size() << " distinct, "
         << o.fragment->steps.size() << "-step fragment)";
    } else {
      os << "MISSING RULES" << (o.depth_exceeded ? " (depth exceeded)" : " (search exhausted)");
    }
    os << "\n";
  }
  return os.str();
}

LibrarySynthesis synthesize_library(const std::vector<GeomKind>& kinds, const RuleBase& rb, const SearchConfig& cfg,
                                    int alternative, int jobs) {
  LibrarySynthesis out;
  std::vector<Signature> sigs;
  for (auto k : kinds) {
    const auto scheme = derive_signature_scheme(k, rb);
    out.raw += static_cast<int>(scheme.entries.size());
    for (const auto& e : scheme.entries) out.over_constrained += e.over_constrained;
    sigs.insert(sigs.end(), scheme.canonical.begin(), scheme.canonical.end());
  }
  out.outcomes.resize(sigs.size());
  const size_t workers = static_cast<size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < sigs.size(); i += workers) out.outcomes[i] = synthesize_fragment(sigs[i], rb, cfg, alternative);
    });
  }
  for (auto& t : pool) t.join();
  out.library.geom_kind = kinds.size() == 1 ? to_string(kinds[0]) : "all";
  out.library.rulebase_hash = rb.hash();
  out.library.depth = cfg.max_depth;
  out.library.alternative = alternative;
  for (const auto& o : out.outcomes) {
    if (o.fragment) out.library.fragments.push_back(*o.fragment);
  }
  return out;
}

SpecReport synthesize_spec(const PlanSpec& spec, const RuleBase& rb, const SearchConfig& cfg) {
  SpecReport rep;
  rep.search = synthesize_skeletal(spec, rb, cfg);
  for (auto& p : reduce_plans(rep.search, rb)) {
    rep.bodies.push_back(elaborate(p));
    rep.reduced.push_back(std::move(p));
  }
  return rep;
}

std::string SpecReport::text() const {
  std::ostringstream os;
  os << explain(search) << "\nskeletal plans:\n";
  for (size_t i = 0; i < search.plans.size(); ++i) {
    os << "(" << i + 1 << ")\n" << to_string(search.plans[i]);
  }
  os << "\nafter redundancy elimination, preferred first:\n";
  for (size_t i = 0; i < reduced.size(); ++i) {
    os << "[" << i << "]\n";
    for (const auto& s : reduced[i]) os << "  " << s.str() << "\n";
    os << "  elaborated:\n";
    std::istringstream body(pretty(bodies[i]));
    for (std::string line; std::getline(body, line);) os << "    " << line << "\n";
  }
  return os.str();
}

SolveResult solve_scene(const Scene& scene, const PlanLibrary& lib, const RuleBase& rb, const ExecConfig& cfg) {
  SolveResult out;
  out.scene = scene;
  const double scale = std::max(1.0, scene.bbox().diagonal());
  const double limit = scene.tol.abs_eps + scene.tol.rel_eps * scale;
  for (size_t k = 0; k < scene.constraints.size(); ++k) {
    const auto& c = scene.constraints[k];
    const std::string label = "constraint " + std::to_string(k) + " " + c.invariant.str();
    GeomState* g = out.scene.geom(c.geom);
    if (!g) throw DofError(label + ": unknown geom '" + c.geom + "'");
    std::vector<Term> all = g->preserved;
    all.push_back(c.invariant);
    const Reformulation m = reformulate(g->kind, all, rb);
    Signature sig;
    try {
      sig = signature_of(g->kind, m.invariants);
    } catch (const OverConstrained& e) {
      throw Diagnostic("signature", e.what(), label);
    }
    const PlanFragment* frag = lib.find(sig);
    if (!frag) throw MissingPlanFragment(sig);
    ExecResult r;
    try {
      r = execute_plan(*frag, out.scene, *g, m.invariants, cfg);
    } catch (const Diagnostic& d) {
      throw d.with_constraint(label);
    }
    r.trace.constraint = label;
    r.trace.signature = to_string(sig);
    EvalContext ctx;
    ctx.scene = &out.scene;
    ctx.geom = &r.state;
    ctx.geom_sym = "$" + g->name;
    ctx.tol = scene.tol;
    for (const auto& inv : m.invariants) {
      double res;
      try {
        res = term_residual(inv, ctx);
      } catch (const DofError& e) {
        throw Diagnostic("verify", e.what(), label);
      }
      r.trace.residuals.emplace_back(inv.str(), res);
      if (!(res <= limit)) {
        throw Diagnostic("verify", "residual " + format_number(res) + " on " + inv.str(), label);
      }
    }
    r.state.preserved = m.invariants;
    *g = r.state;
    out.traces.push_back(std::move(r.trace));
  }
  return out;
}

}  // namespace dofforge
