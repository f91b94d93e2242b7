#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a vector that must carry probability mass is numerically zero.
struct ZeroVector : Error { using Error::Error; };

// Measurement branch with true norm below representable range (readout is
// numerically impossible for the current state).
struct VanishingBranch : Error { using Error::Error; };

// An operator that must be Hermitian produced a complex expectation value or
// failed the symmetry check.
struct NonHermitianLeak : Error { using Error::Error; };

struct DimensionMismatch : Error { using Error::Error; };

// State/derivative pair violates norm conservation, Re<psi|dpsi> != 0.
struct InconsistentInput : Error { using Error::Error; };

// Perturbation does not annihilate the state it claims to.
struct NotInKernel : Error { using Error::Error; };

// Wavefunction mass leaking off the position grid.
struct GridTooNarrow : Error { using Error::Error; };

// Boundary-value parameters at a pole of the path formulas.
struct DegenerateEndpoint : Error { using Error::Error; };

// Effective-Hamiltonian closed form is only implemented for the worked
// boundary case (x_i, y_i, z_i) = (1, 0, 0).
struct OutsideWorkedCase : Error { using Error::Error; };

// Bayesian update where every member likelihood underflowed.
struct AllWeightsVanish : Error { using Error::Error; };

// Density matrix left the positive cone beyond tolerance.
struct NonPositive : Error { using Error::Error; };

struct DuplicateTime : Error { using Error::Error; };

struct InvalidConfig : Error { using Error::Error; };

// CLI-facing parse failures.
struct UnknownFlag : Error { using Error::Error; };
struct InvalidValue : Error { using Error::Error; };

// Not a failure: --help was requested, what() carries the usage text.
struct HelpRequested : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

}  // namespace collapse
