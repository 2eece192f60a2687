#include "dofforge/geom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dofforge {

std::string to_string(GeomKind k) { return k == GeomKind::Circle ? "circle" : "line-segment"; }

GeomKind parse_geom_kind(const std::string& s) {
  if (s == "circle") return GeomKind::Circle;
  if (s == "line-segment" || s == "segment") return GeomKind::LineSegment;
  throw DofError("unknown geom kind '" + s + "'");
}

int geom_dof(GeomKind k) { return k == GeomKind::Circle ? 3 : 4; }

namespace {
struct BiasName {
  Bias b;
  const char* symbol;
  const char* shortname;
};
constexpr BiasName kBiases[] = {
    {Bias::CCW, "BIAS_COUNTERCLOCKWISE", "CCW"}, {Bias::CW, "BIAS_CLOCKWISE", "CW"},
    {Bias::Left, "BIAS_LEFT", "LEFT"},           {Bias::Right, "BIAS_RIGHT", "RIGHT"},
    {Bias::Inside, "BIAS_INSIDE", "INSIDE"},     {Bias::Outside, "BIAS_OUTSIDE", "OUTSIDE"},
};
}  // namespace

std::string bias_symbol(Bias b) {
  for (const auto& n : kBiases) {
    if (n.b == b) return n.symbol;
  }
  return {};
}

std::string bias_short(Bias b) {
  for (const auto& n : kBiases) {
    if (n.b == b) return n.shortname;
  }
  return {};
}

std::optional<Bias> bias_from_symbol(const std::string& s) {
  for (const auto& n : kBiases) {
    if (s == n.symbol) return n.b;
  }
  return std::nullopt;
}

std::optional<Bias> bias_from_short(const std::string& s) {
  for (const auto& n : kBiases) {
    if (s == n.shortname) return n.b;
  }
  return std::nullopt;
}

int bias_sign(Bias b) { return (b == Bias::CCW || b == Bias::Left || b == Bias::Outside) ? 1 : -1; }

GeomState GeomState::circle(const std::string& name, Point2 center, double radius) {
  if (!(radius > 0.0)) throw NonPositiveDimension("circle '" + name + "' needs a positive radius");
  GeomState s;
  s.kind = GeomKind::Circle;
  s.name = name;
  s.center = center;
  s.radius = radius;
  return s;
}

GeomState GeomState::segment(const std::string& name, Point2 e1, Point2 e2) {
  if (!(distance(e1, e2) > 0.0)) throw NonPositiveDimension("segment '" + name + "' needs a positive length");
  GeomState s;
  s.kind = GeomKind::LineSegment;
  s.name = name;
  s.end1 = e1;
  s.end2 = e2;
  return s;
}

Point2 GeomState::point(const std::string& accessor) const {
  if (kind == GeomKind::Circle && accessor == "center") return center;
  if (kind == GeomKind::LineSegment && accessor == "end1") return end1;
  if (kind == GeomKind::LineSegment && accessor == "end2") return end2;
  throw DofError(to_string(kind) + " has no point '" + accessor + "'");
}

Point2 GeomState::anchor() const {
  if (kind == GeomKind::Circle) return center;
  return {0.5 * (end1.x + end2.x), 0.5 * (end1.y + end2.y)};
}

std::string describe(const GroundAction& a) {
  std::ostringstream os;
  switch (a.kind) {
    case GroundAction::Kind::Translate:
      os << "translate (" << format_number(a.vec.x) << " " << format_number(a.vec.y) << ")";
      break;
    case GroundAction::Kind::Rotate:
      os << "rotate about (" << format_number(a.pivot.x) << " " << format_number(a.pivot.y) << ") by "
         << format_number(a.amount);
      break;
    case GroundAction::Kind::Scale:
      os << "scale about (" << format_number(a.pivot.x) << " " << format_number(a.pivot.y) << ") by "
         << format_number(a.amount);
      break;
  }
  return os.str();
}

GeomState apply_action(const GeomState& s, const GroundAction& a, const Tolerance& tol) {
  GeomState out = s;
  switch (a.kind) {
    case GroundAction::Kind::Translate:
      out.center = add(s.center, a.vec);
      out.end1 = add(s.end1, a.vec);
      out.end2 = add(s.end2, a.vec);
      break;
    case GroundAction::Kind::Rotate:
      out.center = rotate_about(s.center, a.pivot, a.amount);
      out.end1 = rotate_about(s.end1, a.pivot, a.amount);
      out.end2 = rotate_about(s.end2, a.pivot, a.amount);
      break;
    case GroundAction::Kind::Scale: {
      const double size = s.size();
      const double next = size + a.amount;
      if (!(next > 0.0) || tol.near_zero(next, size)) {
        throw NonPositiveDimension("scale of '" + s.name + "' by " + format_number(a.amount) +
                                   " leaves a non-positive " + (s.kind == GeomKind::Circle ? "radius" : "length"));
      }
      if (s.kind == GeomKind::Circle) {
        const double k = next / size;
        out.center = add(a.pivot, scaled(v_sub(s.center, a.pivot), k));
        out.radius = next;
      } else {
        const Vector2 d = s.direction().vec();
        if (distance(a.pivot, s.end1) <= tol.abs_eps) {
          out.end2 = add(s.end1, scaled(d, next));
        } else if (distance(a.pivot, s.end2) <= tol.abs_eps) {
          out.end1 = add(s.end2, scaled(d, -next));
        } else {
          const double k = next / size;
          out.end1 = add(a.pivot, scaled(v_sub(s.end1, a.pivot), k));
          out.end2 = add(a.pivot, scaled(v_sub(s.end2, a.pivot), k));
        }
      }
      break;
    }
  }
  return out;
}

std::optional<InvType> inv_type_of(const Term& t) {
  if (!t.is_app()) return std::nullopt;
  const std::string& h = t.name();
  if (h == "invariant-point") return InvType::InvariantPoint;
  if (h == "1d-constrained-point") return InvType::OneDConstrainedPoint;
  if (h == "2d-constrained-point") return InvType::TwoDConstrainedPoint;
  if (h == "fixed-distance-point") return InvType::FixedDistancePoint;
  if (h == "fixed-distance-line") return InvType::FixedDistanceLine;
  if (h == "invariant-direction") return InvType::InvariantDirection;
  if (h == "invariant-dimension") return InvType::InvariantDimension;
  return std::nullopt;
}

std::string inv_head(InvType t) {
  switch (t) {
    case InvType::InvariantPoint: return "invariant-point";
    case InvType::OneDConstrainedPoint: return "1d-constrained-point";
    case InvType::TwoDConstrainedPoint: return "2d-constrained-point";
    case InvType::FixedDistancePoint: return "fixed-distance-point";
    case InvType::FixedDistanceLine: return "fixed-distance-line";
    case InvType::InvariantDirection: return "invariant-direction";
    case InvType::InvariantDimension: return "invariant-dimension";
  }
  return {};
}

double invariant_residual(const GeomState& s, const ResolvedInvariant& inv) {
  const bool circle = s.kind == GeomKind::Circle;
  switch (inv.type) {
    case InvType::InvariantPoint: return distance(s.point(inv.accessor), inv.point);
    case InvType::OneDConstrainedPoint: return locus_residual(inv.locus, s.point(inv.accessor));
    case InvType::TwoDConstrainedPoint: return 0.0;
    case InvType::FixedDistancePoint: {
      if (!circle) return std::abs(distance(s.end1, inv.point) - inv.dist);
      const double want = inv.bias == Bias::Inside ? s.radius - inv.dist : inv.dist + s.radius;
      return std::abs(distance(s.center, inv.point) - want);
    }
    case InvType::FixedDistanceLine: {
      // circles: boundary at dist on the bias side, so the center sits at dist + radius
      const double sd = signed_distance(inv.locus, circle ? s.center : s.end1);
      return std::abs(bias_sign(inv.bias) * sd - (circle ? inv.dist + s.radius : inv.dist));
    }
    case InvType::InvariantDirection:
      if (circle) return 0.0;
      return std::abs(angle_between(s.direction(), inv.dir));
    case InvType::InvariantDimension: return std::abs(s.size() - inv.value);
  }
  return 0.0;
}

bool Signature::operator<(const Signature& o) const {
  if (kind != o.kind) return kind < o.kind;
  return f < o.f;
}

int Signature::constraint_dof() const {
  int n = 0;
  for (int v : f) n += v;
  return n;
}

namespace {

const char* point_level(int v) { return v == 0 ? "Free" : v == 1 ? "L1" : "Fixed"; }
const char* fixed_level(int v) { return v == 0 ? "Free" : "Fixed"; }

int parse_level(const std::string& v, bool point) {
  if (v == "Free") return 0;
  if (v == "Fixed") return point ? 2 : 1;
  if (point && v == "L1") return 1;
  throw DofError("bad signature level '" + v + "'");
}

}  // namespace

std::string to_string(const Signature& s) {
  std::ostringstream os;
  if (s.kind == GeomKind::Circle) {
    os << "<Center-" << point_level(s.f[0]) << ",Radius-" << fixed_level(s.f[1]) << ", FixedPts-" << s.f[2]
       << ",FixedLines-" << s.f[3] << ">";
  } else {
    os << "<End1-" << point_level(s.f[0]) << ",End2-" << point_level(s.f[1]) << ", Direction-"
       << fixed_level(s.f[2]) << ",Length-" << fixed_level(s.f[3]) << ",FixedLines-" << s.f[4] << ">";
  }
  return os.str();
}

Signature parse_signature(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != ' ') t += c;
  }
  if (t.size() < 2 || t.front() != '<' || t.back() != '>') throw DofError("bad signature '" + text + "'");
  std::vector<std::pair<std::string, std::string>> fields;
  std::stringstream ss(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw DofError("bad signature field '" + item + "'");
    fields.emplace_back(item.substr(0, dash), item.substr(dash + 1));
  }
  Signature s;
  auto count = [&](const std::string& v) {
    if (v.size() != 1 || v[0] < '0' || v[0] > '2') throw DofError("bad signature count '" + v + "'");
    return v[0] - '0';
  };
  if (fields.size() == 4 && fields[0].first == "Center" && fields[1].first == "Radius" &&
      fields[2].first == "FixedPts" && fields[3].first == "FixedLines") {
    s.kind = GeomKind::Circle;
    s.f = {parse_level(fields[0].second, true), parse_level(fields[1].second, false), count(fields[2].second),
           count(fields[3].second), 0};
    return s;
  }
  if (fields.size() == 5 && fields[0].first == "End1" && fields[1].first == "End2" &&
      fields[2].first == "Direction" && fields[3].first == "Length" && fields[4].first == "FixedLines") {
    s.kind = GeomKind::LineSegment;
    s.f = {parse_level(fields[0].second, true), parse_level(fields[1].second, true),
           parse_level(fields[2].second, false), parse_level(fields[3].second, false), count(fields[4].second)};
    return s;
  }
  throw DofError("bad signature '" + text + "'");
}

std::vector<Signature> raw_signatures(GeomKind k) {
  std::vector<Signature> out;
  if (k == GeomKind::Circle) {
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 2; ++r)
        for (int p = 0; p < 3; ++p)
          for (int l = 0; l < 3; ++l) out.push_back({k, {c, r, p, l, 0}});
  } else {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int d = 0; d < 2; ++d)
          for (int len = 0; len < 2; ++len)
            for (int l = 0; l < 3; ++l) out.push_back({k, {a, b, d, len, l}});
  }
  return out;
}

bool dof_admissible(const Signature& s) { return s.constraint_dof() <= geom_dof(s.kind); }

Signature signature_of(GeomKind k, const std::vector<Term>& invariants) {
  Signature s;
  s.kind = k;
  for (const auto& inv : invariants) {
    const auto type = inv_type_of(inv);
    if (!type) throw DofError("not an invariant: " + inv.str());
    std::string acc;
    if (*type == InvType::InvariantPoint || *type == InvType::OneDConstrainedPoint) {
      const Term& a = inv.arg(1);
      if (!a.is_app(">>") || !a.arg(1).is_sym()) throw DofError("invariant without a point accessor: " + inv.str());
      acc = a.arg(1).name();
    }
    const int weight = *type == InvType::InvariantPoint ? 2 : 1;
    if (k == GeomKind::Circle) {
      switch (*type) {
        case InvType::InvariantPoint:
        case InvType::OneDConstrainedPoint: s.f[0] += weight; break;
        case InvType::FixedDistancePoint: s.f[2] += 1; break;
        case InvType::FixedDistanceLine: s.f[3] += 1; break;
        case InvType::InvariantDimension: s.f[1] += 1; break;
        default: break;
      }
    } else {
      switch (*type) {
        case InvType::InvariantPoint:
        case InvType::OneDConstrainedPoint: s.f[acc == "end2" ? 1 : 0] += weight; break;
        case InvType::FixedDistancePoint: s.f[0] += 1; break;
        case InvType::FixedDistanceLine: s.f[4] += 1; break;
        case InvType::InvariantDirection: s.f[2] += 1; break;
        case InvType::InvariantDimension: s.f[3] += 1; break;
        default: break;
      }
    }
  }
  const std::array<int, 5> cap = k == GeomKind::Circle ? std::array<int, 5>{2, 1, 2, 2, 0}
                                                       : std::array<int, 5>{2, 2, 1, 1, 2};
  for (size_t i = 0; i < cap.size(); ++i) {
    if (s.f[i] > cap[i]) throw OverConstrained("field overflow in " + join_terms(invariants));
  }
  if (!dof_admissible(s)) throw OverConstrained("more constraints than degrees of freedom in " + join_terms(invariants));
  return s;
}

std::vector<Term> representative(const Signature& s, const std::string& g, bool generic_bias) {
  const Term G = Term::sym(g);
  auto acc = [&](const char* field) { return Term::app(">>", {G, Term::sym(field)}); };
  auto sym = [](const std::string& n) { return Term::sym(n); };
  std::vector<Term> out;
  auto point_constraint = [&](int level, const char* field, const std::string& idx) {
    if (level == 1) out.push_back(Term::app("1d-constrained-point", {G, acc(field), sym("$locus" + idx)}));
    if (level == 2) out.push_back(Term::app("invariant-point", {G, acc(field), sym("$pt" + idx)}));
  };
  auto lines = [&](int n) {
    for (int i = 1; i <= n; ++i) {
      const std::string idx = std::to_string(i);
      const Term bias = generic_bias ? sym("$lbias" + idx) : sym(i == 1 ? "BIAS_COUNTERCLOCKWISE" : "BIAS_CLOCKWISE");
      out.push_back(Term::app("fixed-distance-line", {G, sym("$line" + idx), sym("$ldist" + idx), bias}));
    }
  };
  if (s.kind == GeomKind::Circle) {
    point_constraint(s.f[0], "center", "1");
    if (s.f[1]) out.push_back(Term::app("invariant-dimension", {G, sym("$dim1")}));
    for (int i = 1; i <= s.f[2]; ++i) {
      const std::string idx = std::to_string(i);
      const Term bias = generic_bias ? sym("$pbias" + idx) : sym("BIAS_OUTSIDE");
      out.push_back(Term::app("fixed-distance-point", {G, sym("$fpt" + idx), sym("$pdist" + idx), bias}));
    }
    lines(s.f[3]);
  } else {
    point_constraint(s.f[0], "end1", "1");
    point_constraint(s.f[1], "end2", "2");
    if (s.f[2]) out.push_back(Term::app("invariant-direction", {G, sym("$dir1")}));
    if (s.f[3]) out.push_back(Term::app("invariant-dimension", {G, sym("$dim1")}));
    lines(s.f[4]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dofforge
