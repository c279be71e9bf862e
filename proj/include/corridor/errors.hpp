#pragma once

#include <stdexcept>
#include <string>

namespace corridor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a scalar argument failed (negative time, bad count, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Divided-difference nodes are closer than the supported relative separation.
class NearCoincidentPoints : public Error {
 public:
  using Error::Error;
};

/// A bracketing search ran past its expansion cap without a sign change.
class BracketNotFound : public Error {
 public:
  using Error::Error;
};

/// Grid refinement failed to isolate both stationary points of the 1-cycle output.
class RootsNotResolved : public Error {
 public:
  using Error::Error;
};

class InvalidCorridor : public Error {
 public:
  using Error::Error;
};

class InvalidSlopes : public Error {
 public:
  using Error::Error;
};

class AlphaOutOfRange : public Error {
 public:
  using Error::Error;
};

class EffectOutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyCohort : public Error {
 public:
  using Error::Error;
};

class DuplicatePin : public Error {
 public:
  explicit DuplicatePin(const std::string& pin)
      : Error("duplicate PIN in cohort: " + pin), pin_(pin) {}

  const std::string& pin() const noexcept { return pin_; }

 private:
  std::string pin_;
};

}  // namespace corridor
