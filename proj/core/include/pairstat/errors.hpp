#pragma once

#include <stdexcept>
#include <string>

namespace pairstat {

/// Base class for the library's domain errors. Invalid arguments (negative
/// mean pair numbers, probabilities outside [0,1], ...) are reported with
/// std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The certified truncation index would exceed TruncationPolicy::hard_cap.
class CapExceeded : public Error {
 public:
  CapExceeded(int needed_at_least, int hard_cap)
      : Error("series truncation needs more than " + std::to_string(hard_cap) +
              " terms (certified tail still above tolerance at x=" +
              std::to_string(needed_at_least) + "); mean pair number too large "
              "for the requested tolerance"),
        hard_cap_(hard_cap) {}

  int hard_cap() const noexcept { return hard_cap_; }

 private:
  int hard_cap_;
};

/// Measurement setting not defined for the requested source kind.
class UnsupportedSetting : public Error {
 public:
  using Error::Error;
};

/// Tomographic projector set does not span the two-qubit operator space.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested beyond its supported pair number.
class XMaxTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace pairstat
