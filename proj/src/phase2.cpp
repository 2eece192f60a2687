#include "dofforge/phase2.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace dofforge {

namespace {

bool is_accessor(const Term& t, const std::string& g) {
  return t.is_app(">>") && t.arg(0).is_sym(g) && t.arg(1).is_sym();
}

// Does t read a field of g outside `allowed`?
bool reads_other(const Term& t, const std::string& g, const std::set<std::string>& allowed) {
  if (is_accessor(t, g)) return !allowed.count(t.arg(1).name());
  if (!t.is_app()) return false;
  for (const auto& a : t.args()) {
    if (reads_other(a, g, allowed)) return true;
  }
  return false;
}

const std::set<std::string> kNonPositional = {"radius", "length", "direction"};

bool is_step(const Term& s, const std::string& head, const std::string& g) {
  return s.is_app(head) && s.arg(0).is_sym(g);
}

// (translate g (v- target (>> g p)))
bool split_translate(const Term& s, const std::string& g, Term& target, Term& ref) {
  if (!is_step(s, "translate", g) || !s.arg(1).is_app("v-") || !is_accessor(s.arg(1).arg(1), g)) return false;
  target = s.arg(1).arg(0);
  ref = s.arg(1).arg(1);
  return true;
}

bool arbitrary_point(const Term& t, Term& locus) {
  if (!t.is_app(">>") || !t.arg(1).is_sym("arbitrary-point")) return false;
  locus = t.arg(0);
  return true;
}

bool translate_redundant(const Term& first, const Term& second, const std::string& g) {
  Term t1, r1, t2, r2;
  if (!split_translate(first, g, t1, r1) || !split_translate(second, g, t2, r2) || r1 != r2) return false;
  if (!reads_other(t2, g, kNonPositional)) return true;
  // the second target may still read the position through the locus the
  // first step moved along, provided that locus does not move with the geom
  Term locus;
  if (!arbitrary_point(t1, locus)) return false;
  const bool stable = !reads_other(locus, g, kNonPositional) ||
                      (locus.is_app("make-line-locus") && locus.arg(0) == r1 &&
                       !reads_other(locus.arg(1), g, kNonPositional));
  if (!stable) return false;
  return !reads_other(replace(t2, locus, Term::sym("LOCUS")), g, kNonPositional);
}

// A non-translate step whose outcome on the non-positional fields does not
// depend on where the geom sits; dropping an earlier translate cannot change it.
bool position_neutral(const Term& s, const std::string& g) {
  if (!s.is_app() || s.arity() < 2 || !s.arg(0).is_sym(g) || s.is_app("translate")) return false;
  if (!is_accessor(s.arg(1), g)) return false;
  for (size_t k = 2; k < s.arity(); ++k) {
    if (reads_other(s.arg(k), g, kNonPositional)) return false;
  }
  return true;
}

std::string size_field(GeomKind kind) { return kind == GeomKind::Circle ? "radius" : "length"; }

bool scale_redundant(const Term& first, const Term& second, GeomKind kind, const std::string& g) {
  if (!is_step(first, "scale", g) || !is_step(second, "scale", g)) return false;
  const Term& pivot = first.arg(1);
  if (pivot != second.arg(1) || !is_accessor(pivot, g)) return false;
  const Term& amt = second.arg(2);
  if (!amt.is_app("minus") || !is_accessor(amt.arg(1), g) || !amt.arg(1).arg(1).is_sym(size_field(kind))) {
    return false;
  }
  const std::string pf = pivot.arg(1).name();
  if (kind == GeomKind::Circle) return pf == "center" && !reads_other(amt.arg(0), g, {"center"});
  return !reads_other(amt.arg(0), g, {pf, "direction"});
}

bool rotate_redundant(const Term& first, const Term& second, const std::string& g) {
  if (!is_step(first, "rotate", g) || !is_step(second, "rotate", g)) return false;
  const Term& pivot = first.arg(1);
  if (pivot != second.arg(1) || !is_accessor(pivot, g)) return false;
  const Term& amt = second.arg(3);
  if (amt.is_app("direction-angle")) {
    return is_accessor(amt.arg(0), g) && amt.arg(0).arg(1).is_sym("direction") && !reads_other(amt.arg(1), g, {});
  }
  if (amt.is_app("rotation-to")) {
    return amt.arg(0) == pivot && is_accessor(amt.arg(1), g) &&
           !reads_other(amt.arg(2), g, {pivot.arg(1).name(), "length"});
  }
  return false;
}

// While an invariant holds, its achieve locus and its preserve locus are the
// same set; prefer the preserve form so equivalent plans print alike.
Term normalize_first(const Term& step, GeomKind kind, const std::string& g, const std::vector<Term>& held,
                     const RuleBase& rb) {
  Term out = step;
  int fresh = 0;
  for (const auto& inv : held) {
    const auto acts = actions_for(inv, kind, rb, fresh);
    for (const auto& a : acts.achieve) {
      Term ta, ra, la;
      if (!split_translate(a, g, ta, ra) || !arbitrary_point(ta, la) || !vars_of(la).empty()) continue;
      for (const auto& p : acts.preserve) {
        Term tp, rp, lp;
        if (!split_translate(p, g, tp, rp) || rp != ra || !arbitrary_point(tp, lp) || lp == la) continue;
        if (contains(out, la)) out = canonical_term(replace(out, la, lp));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Term> eliminate_redundant(const std::vector<Term>& steps0, GeomKind kind, const std::string& g,
                                      const std::vector<Term>& held, const RuleBase& rb) {
  std::vector<Term> steps = steps0;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i + 1 < steps.size() && !changed; ++i) {
      bool drop = scale_redundant(steps[i], steps[i + 1], kind, g) || rotate_redundant(steps[i], steps[i + 1], g);
      for (size_t j = i + 1; !drop && j < steps.size(); ++j) {
        if (translate_redundant(steps[i], steps[j], g)) drop = true;
        if (!position_neutral(steps[j], g)) break;
      }
      if (drop) {
        steps.erase(steps.begin() + static_cast<long>(i));
        changed = true;
      }
    }
    if (!steps.empty()) {
      const Term n = normalize_first(steps[0], kind, g, held, rb);
      if (n != steps[0]) {
        steps[0] = n;
        changed = true;
      }
    }
  }
  return canonical_vars(steps);
}

int free_param_count(const std::vector<Term>& steps) {
  std::set<std::string> arb, vars;
  auto walk = [&](auto&& self, const Term& t) -> void {
    Term l;
    if (arbitrary_point(t, l)) arb.insert(t.str());
    if (t.is_var()) vars.insert(t.name());
    if (t.is_app()) {
      for (const auto& a : t.args()) self(self, a);
    }
  };
  for (const auto& s : steps) walk(walk, s);
  return static_cast<int>(arb.size() + vars.size());
}

PlanWeight plan_weight(const std::vector<Term>& steps) {
  std::set<std::string> kinds;
  for (const auto& s : steps) kinds.insert(s.name());
  int isect = 0;
  auto walk = [&](auto&& self, const Term& t) -> void {
    if (t.is_app("0d-intersection")) ++isect;
    if (t.is_app()) {
      for (const auto& a : t.args()) self(self, a);
    }
  };
  for (const auto& s : steps) walk(walk, s);
  return {static_cast<int>(kinds.size()), free_param_count(steps), -isect, -static_cast<int>(steps.size())};
}

bool subsumes(const std::vector<Term>& a0, const std::vector<Term>& b, const RuleBase& rb) {
  if (free_param_count(a0) == 0 || b.size() > a0.size()) return false;
  std::vector<Term> a;
  for (const auto& s : a0) a.push_back(rename_apart(s, "sub"));
  if (join_terms(canonical_vars(a)) == join_terms(canonical_vars(b))) return false;
  auto embed = [&](auto&& self, size_t i, size_t j) -> bool {
    if (i == b.size()) return true;
    for (size_t k = j; k + (b.size() - i) <= a.size(); ++k) {
      if (instance_of(b[i], a[k], rb.matches) && self(self, i + 1, k + 1)) return true;
    }
    return false;
  };
  return embed(embed, 0, 0);
}

std::vector<std::vector<Term>> prioritize(const std::vector<std::vector<Term>>& plans, const RuleBase& rb) {
  const size_t n = plans.size();
  std::vector<std::vector<bool>> sub(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j) sub[i][j] = subsumes(plans[i], plans[j], rb);
    }
  }
  auto better = [&](size_t x, size_t y) {
    const auto wx = plan_weight(plans[x]), wy = plan_weight(plans[y]);
    if (wx != wy) return wx > wy;
    return join_terms(plans[x]) < join_terms(plans[y]);
  };
  std::vector<size_t> left(n);
  for (size_t i = 0; i < n; ++i) left[i] = i;
  std::vector<std::vector<Term>> out;
  while (!left.empty()) {
    std::vector<size_t> layer;
    for (size_t j : left) {
      bool dominated = false;
      for (size_t i : left) dominated = dominated || sub[i][j];
      if (!dominated) layer.push_back(j);
    }
    // mutual subsumption (alpha-variants): fall back to the best by weight
    if (layer.empty()) layer.push_back(*std::min_element(left.begin(), left.end(), better));
    std::sort(layer.begin(), layer.end(), better);
    for (size_t j : layer) {
      out.push_back(plans[j]);
      left.erase(std::find(left.begin(), left.end(), j));
    }
  }
  return out;
}

Step Step::bind(std::string local, Term e) {
  Step s;
  s.kind = Kind::Bind;
  s.local = std::move(local);
  s.expr = std::move(e);
  return s;
}

Step Step::apply(Term action) {
  Step s;
  s.kind = Kind::Apply;
  s.expr = std::move(action);
  return s;
}

Step Step::for_min(std::string local, Domain d, Term source, std::vector<Step> body) {
  Step s;
  s.kind = Kind::ForMin;
  s.local = std::move(local);
  s.domain = d;
  s.expr = std::move(source);
  s.body = std::move(body);
  return s;
}

Step Step::abort(std::string msg) {
  Step s;
  s.kind = Kind::Abort;
  s.message = std::move(msg);
  return s;
}

bool operator==(const Step& a, const Step& b) {
  return a.kind == b.kind && a.local == b.local && a.expr == b.expr && a.domain == b.domain && a.body == b.body &&
         a.coincident == b.coincident && a.empty == b.empty && a.message == b.message;
}

std::string to_string(Step::Kind k) {
  switch (k) {
    case Step::Kind::Bind: return "bind";
    case Step::Kind::Apply: return "apply";
    case Step::Kind::ForMin: return "for-min";
    case Step::Kind::Case: return "case";
    case Step::Kind::Abort: return "abort";
  }
  return "?";
}

std::string to_string(Step::Domain d) {
  switch (d) {
    case Step::Domain::Points: return "points";
    case Step::Domain::Amount: return "amount";
    case Step::Domain::Angle: return "angle";
  }
  return "?";
}

namespace {

// Innermost subterm satisfying pred, searching arguments first.
const Term* innermost(const Term& t, const std::function<bool(const Term&)>& pred) {
  if (t.is_app()) {
    for (const auto& a : t.args()) {
      if (const Term* r = innermost(a, pred)) return r;
    }
  }
  return pred(t) ? &t : nullptr;
}

class Elaborator {
 public:
  explicit Elaborator(const std::vector<Term>& steps) : steps_(steps) {}

  std::vector<Step> run() { return steps_.empty() ? std::vector<Step>{} : step(0, steps_[0], {}); }

 private:
  std::vector<Step> step(size_t i, const Term& cur, std::set<std::string> bound) {
    Term l;
    if (const Term* arb = innermost(cur, [&](const Term& t) { return arbitrary_point(t, l); })) {
      const Term at = *arb;
      arbitrary_point(at, l);
      const std::string local = "pt" + std::to_string(++counter_);
      bound.insert(local);
      return {Step::for_min(local, Step::Domain::Points, l, step(i, replace(cur, at, Term::var(local)), bound))};
    }
    std::vector<std::string> vars;
    collect_vars(cur, vars);
    for (const auto& v : vars) {
      if (bound.count(v)) continue;
      if (cur.is_app("rotate") && cur.arg(2).is_var() && cur.arg(2).name() == v) {
        return step(i, replace(cur, Term::var(v), Term::sym("AXIS_Z")), bound);
      }
      Step::Domain d;
      if (cur.is_app("scale") && cur.arg(2).is_var() && cur.arg(2).name() == v) {
        d = Step::Domain::Amount;
      } else if (cur.is_app("rotate") && cur.arg(3).is_var() && cur.arg(3).name() == v) {
        d = Step::Domain::Angle;
      } else {
        throw DofError("cannot elaborate free parameter ?" + v + " in " + cur.str());
      }
      bound.insert(v);
      return {Step::for_min(v, d, Term::sym("AMOUNT"), step(i, cur, bound))};
    }
    if (const Term* x = innermost(cur, [](const Term& t) { return t.is_app("0d-intersection"); })) {
      const Term at = *x;
      const std::string local = "ix" + std::to_string(++counter_);
      bound.insert(local);
      const Term lv = Term::var(local);
      const auto rest = step(i, replace(cur, at, lv), bound);
      Step c;
      c.kind = Step::Kind::Case;
      c.local = local;
      c.expr = lv;
      c.body = {Step::for_min(local, Step::Domain::Points, lv, rest)};
      c.coincident = {Step::for_min(local, Step::Domain::Points, lv, rest)};
      c.empty = {Step::abort("loci do not intersect: " + at.arg(0).str() + " and " + at.arg(1).str())};
      return {Step::bind(local, at), c};
    }
    std::vector<Step> out{Step::apply(cur)};
    if (i + 1 < steps_.size()) {
      auto rest = step(i + 1, steps_[i + 1], bound);
      out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
  }

  const std::vector<Term>& steps_;
  int counter_ = 0;
};

void pretty_into(std::ostringstream& os, const std::vector<Step>& body, int indent) {
  const std::string pad(2 * indent, ' ');
  for (const auto& s : body) {
    switch (s.kind) {
      case Step::Kind::Bind: os << pad << "?" << s.local << " := " << s.expr.str() << "\n"; break;
      case Step::Kind::Apply: os << pad << s.expr.str() << "\n"; break;
      case Step::Kind::Abort: os << pad << "abort \"" << s.message << "\"\n"; break;
      case Step::Kind::ForMin:
        os << pad << "for ?" << s.local << " in " << to_string(s.domain)
           << (s.domain == Step::Domain::Points ? " of " + s.expr.str() : std::string()) << " minimizing motion:\n";
        pretty_into(os, s.body, indent + 1);
        break;
      case Step::Kind::Case:
        os << pad << "case " << s.expr.str() << "\n" << pad << "  points:\n";
        pretty_into(os, s.body, indent + 2);
        os << pad << "  coincident:\n";
        pretty_into(os, s.coincident, indent + 2);
        os << pad << "  empty:\n";
        pretty_into(os, s.empty, indent + 2);
        break;
    }
  }
}

void unbound_into(const std::vector<Step>& body, std::set<std::string> bound, std::vector<std::string>& out) {
  auto check = [&](const Term& t) {
    for (const auto& v : vars_of(t)) {
      if (!bound.count(v)) out.push_back(v);
    }
  };
  for (const auto& s : body) {
    switch (s.kind) {
      case Step::Kind::Bind:
        check(s.expr);
        bound.insert(s.local);
        break;
      case Step::Kind::Apply: check(s.expr); break;
      case Step::Kind::Abort: break;
      case Step::Kind::ForMin: {
        check(s.expr);
        auto inner = bound;
        inner.insert(s.local);
        unbound_into(s.body, inner, out);
        break;
      }
      case Step::Kind::Case:
        check(s.expr);
        unbound_into(s.body, bound, out);
        unbound_into(s.coincident, bound, out);
        unbound_into(s.empty, bound, out);
        break;
    }
  }
}

}  // namespace

std::vector<Step> elaborate(const std::vector<Term>& steps) { return Elaborator(steps).run(); }

std::string pretty(const std::vector<Step>& body) {
  std::ostringstream os;
  pretty_into(os, body, 0);
  return os.str();
}

std::vector<std::string> unbound_locals(const std::vector<Step>& body) {
  std::vector<std::string> out;
  unbound_into(body, {}, out);
  return out;
}

MotionSpec MotionSpec::standard() {
  MotionSpec m;
  m.translate = [](const GeomState& b, const GroundAction&, const GeomState& a) {
    const double d = distance(b.anchor(), a.anchor());
    return d * d;
  };
  m.rotate = [](const GeomState& b, const GroundAction& act, const GeomState&) {
    const double arc = act.amount * b.size();
    return arc * arc;
  };
  m.scale = [](const GeomState&, const GroundAction& act, const GeomState&) { return act.amount * act.amount; };
  return m;
}

double MotionSpec::cost(const GeomState& before, const GroundAction& a, const GeomState& after) const {
  switch (a.kind) {
    case GroundAction::Kind::Translate: return translate(before, a, after);
    case GroundAction::Kind::Rotate: return rotate(before, a, after);
    case GroundAction::Kind::Scale: return scale(before, a, after);
  }
  return 0.0;
}

double total_motion(const std::vector<MotionRecord>& trace, const MotionSpec& motion) {
  double sum = 0.0;
  for (const auto& r : trace) sum += motion.cost(r.before, r.action, r.after);
  return sum;
}

std::vector<size_t> least_motion_search(const std::vector<size_t>& sizes,
                                        const std::function<double(const std::vector<size_t>&)>& objective,
                                        int max_passes, std::vector<size_t> cur) {
  if (cur.empty()) cur.assign(sizes.size(), 0);
  double best = objective(cur);
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (size_t d = 0; d < sizes.size(); ++d) {
      auto trial = cur;
      for (size_t k = 0; k < sizes[d]; ++k) {
        if (k == cur[d]) continue;
        trial[d] = k;
        const double v = objective(trial);
        if (v < best) {
          best = v;
          cur = trial;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return cur;
}

}  // namespace dofforge
