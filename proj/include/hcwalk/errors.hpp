#pragma once

#include <stdexcept>
#include <string>

namespace hcwalk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed parameters outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// 2^d would exceed the configured dimension cap.
class DimensionOverflow : public Error {
 public:
  using Error::Error;
};

// A state failed a numerical sanity check (non-real diagonal, negative
// eigenvalue beyond roundoff, ...).
class CorruptedState : public Error {
 public:
  using Error::Error;
};

}  // namespace hcwalk
