// Python module _core. Scenes, libraries and specs cross the boundary as JSON
// text; the package wrapper turns them into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dofforge/io.hpp"
#include "dofforge/reformulate.hpp"
#include "dofforge/runtime.hpp"
#include "dofforge/verify.hpp"

namespace py = pybind11;
using namespace dofforge;

namespace {

std::vector<GeomKind> kinds(const std::string& geom) {
  if (geom == "all") return {GeomKind::Circle, GeomKind::LineSegment};
  return {parse_geom_kind(geom)};
}

py::dict scheme(const std::string& geom) {
  const auto s = derive_signature_scheme(parse_geom_kind(geom), default_rule_base());
  std::vector<std::string> canonical;
  for (const auto& c : s.canonical) canonical.push_back(to_string(c));
  py::dict d;
  d["raw"] = s.entries.size();
  d["canonical"] = canonical;
  return d;
}

py::tuple synthesize(const std::string& geom, std::vector<std::string> without) {
  RuleBase rb = default_rule_base();
  for (const auto& w : without) rb = rb.without(w);
  const auto out = synthesize_library(kinds(geom), rb);
  std::vector<std::string> missing;
  for (const auto& m : out.missing()) missing.push_back(to_string(m));
  return py::make_tuple(library_to_json(out.library).dump(), out.solved(), out.outcomes.size(), missing);
}

std::string spec_report(const std::string& spec) {
  return synthesize_spec(spec_from_json(Json::parse(spec)), default_rule_base()).text();
}

py::tuple solve(const std::string& scene, const std::string& library) {
  const auto r = solve_scene(scene_from_json(Json::parse(scene)), library_from_json(Json::parse(library)),
                             default_rule_base());
  std::vector<double> motion;
  for (const auto& t : r.traces) motion.push_back(t.motion);
  return py::make_tuple(scene_to_json(r.scene).dump(), motion);
}

py::tuple verify(const std::string& scene, double tol) {
  const auto rep = verify_scene(scene_from_json(Json::parse(scene)), tol);
  std::vector<double> residuals;
  for (const auto& row : rep.rows) residuals.push_back(row.residual);
  return py::make_tuple(rep.pass(), rep.max_residual(), residuals);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "plan-fragment synthesis and incremental solving for 2D constraints";

  // translators run newest first, so the subclasses go after the base
  auto& error = py::register_exception<DofError>(m, "Error");
  py::register_exception<Diagnostic>(m, "Diagnostic", error.ptr());
  py::register_exception<MissingPlanFragment>(m, "MissingPlanFragment", error.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", error.ptr());

  m.def("scheme", &scheme, py::arg("geom"));
  m.def("synthesize", &synthesize, py::arg("geom"), py::arg("without") = std::vector<std::string>{});
  m.def("spec_report", &spec_report, py::arg("spec"));
  m.def("solve", &solve, py::arg("scene"), py::arg("library"));
  m.def("verify", &verify, py::arg("scene"), py::arg("tol") = 1e-9);
  m.def("reformulate", [](const std::string& geom, const std::vector<std::string>& invariants) {
    std::vector<Term> ts;
    for (const auto& s : invariants) ts.push_back(parse_term(s));
    std::vector<std::string> out;
    for (const auto& t : reformulate(parse_geom_kind(geom), ts, default_rule_base()).invariants) out.push_back(t.str());
    return out;
  });
}
