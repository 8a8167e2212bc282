#pragma once

#include <stdexcept>
#include <string>

namespace ocw {

/// Malformed configuration, invalid quantum numbers, inconsistent sizes.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical or physical failure: singular system, invariant violation,
/// unstable integration, inconsistent measurement data.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ocw
