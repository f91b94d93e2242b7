#pragma once

namespace collapse {

// Every numeric threshold used by the library lives here so a run can be
// audited or tightened from one place. Defaults are the values the test
// suite pins.
struct Tolerances {
  double unit_norm = 1e-12;           // | ||psi|| - 1 |
  double hermiticity = 1e-12;         // max |A - A^dagger| entry
  double expectation_imag = 1e-10;    // imaginary leak allowed in <op>
  double bloch_roundtrip = 1e-10;
  double reconstruction_residual = 1e-8;   // || H psi - i dpsi ||
  double norm_rate = 1e-8;                 // |Re <psi|dpsi>|
  double kernel_residual = 1e-10;          // || T psi || for basis elements
  double kernel_membership = 1e-8;         // || T psi || accepted by callers
  double svd_rank_cutoff = 1e-10;          // relative to largest singular value
  double density_positivity = -1e-10;      // most negative eigenvalue allowed
  double vanishing_norm = 1e-300;          // branch norm treated as impossible
  double grid_mass_leak = 1e-10;           // mass allowed near grid edges
  double collapse_threshold = 1.0 - 1e-6;  // population declaring an outcome
  double weak_regime_ratio = 0.1;          // dt/tau above this gets a warning
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace collapse
