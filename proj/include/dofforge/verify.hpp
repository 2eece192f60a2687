#pragma once

#include <string>
#include <vector>

#include "dofforge/eval.hpp"

namespace dofforge {

struct ResidualRow {
  size_t index = 0;
  std::string geom;
  std::string invariant;
  double residual = 0.0;
  bool pass = false;
  std::string error;  // set when the verifier cannot read the invariant
};

struct VerifyReport {
  double tolerance = 1e-9;
  std::vector<ResidualRow> rows;

  double max_residual() const;
  bool pass() const;
  std::string table() const;
};

// Residual of every scene constraint on the scene's current geom states,
// computed from the invariant definitions with a resolver of its own (no plan
// or measurement code). Understands entity names, literals, accessors and the
// make-*-locus constructors; anything else is reported as an error row.
VerifyReport verify_scene(const Scene& scene, double tol = 1e-9);

}  // namespace dofforge
