#pragma once

#include <stdexcept>
#include <string>

namespace spd {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input matrix fails the symmetry tolerance.
struct NotSymmetricError : Error {
  using Error::Error;
};

/// Input matrix has a non-positive (or denormal) eigenvalue.
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};

/// Scalar argument outside its documented domain (e.g. t outside [0, T]).
struct OutOfRangeError : Error {
  using Error::Error;
};

/// Tensors with incompatible shapes.
struct ShapeError : Error {
  using Error::Error;
};

/// Unreadable or unsupported input file.
struct FormatError : Error {
  using Error::Error;
};

/// A frequency bin where |c2 + f| falls below the singularity guard.
struct SingularBinError : Error {
  using Error::Error;
};

/// Least-squares fit failed (insufficient data or no convergence).
struct FitError : Error {
  using Error::Error;
};

/// Inverse DFT input is not conjugate-symmetric within tolerance.
struct NonHermitianError : Error {
  using Error::Error;
};

/// Bisection bracket contains no root.
struct NoRootError : Error {
  using Error::Error;
};

/// Training loss became non-finite.
struct NonFiniteLossError : Error {
  using Error::Error;
};

}  // namespace spd
