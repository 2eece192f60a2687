"""Python access to the dofforge planner and solver.

Scenes and plan libraries are plain dicts in the same shape as the JSON files
the command line tool reads and writes.
"""
import json

from . import _core
from ._core import Diagnostic, Error, MissingPlanFragment, SchemaError

__all__ = [
    "Diagnostic", "Error", "MissingPlanFragment", "SchemaError",
    "signatures", "synthesize", "spec_report", "solve", "verify", "reformulate",
]


def signatures(geom="circle"):
    """Canonical signature strings and the raw count, as a dict."""
    return _core.scheme(geom)


def synthesize(geom="circle", without=()):
    """Build a plan library. Returns (library, solved, total, missing)."""
    text, solved, total, missing = _core.synthesize(geom, list(without))
    return json.loads(text), solved, total, missing


def spec_report(spec):
    return _core.spec_report(json.dumps(spec))


def solve(scene, library):
    """Solved scene and the motion spent on each constraint."""
    text, motion = _core.solve(json.dumps(scene), json.dumps(library))
    return json.loads(text), motion


def verify(scene, tol=1e-9):
    ok, worst, residuals = _core.verify(json.dumps(scene), tol)
    return {"pass": ok, "max_residual": worst, "residuals": residuals}


def reformulate(geom, invariants):
    return _core.reformulate(geom, list(invariants))
