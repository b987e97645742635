#pragma once

namespace precmat {

// Every numerical tolerance used by the core matrix layer, in one place.
struct Tolerances {
  double symmetry = 1e-8;        // max |S - S^T| accepted when ingesting files
  double reconstruction = 1e-8;  // ||U M U^T - S||_F budget for eigendecompositions
  double orthonormality = 1e-10; // ||U^T U - I||_max budget
  double psd = 1e-10;            // how negative an "eigenvalue zero" may be
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace precmat
