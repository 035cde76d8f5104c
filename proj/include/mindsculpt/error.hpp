#pragma once

#include <stdexcept>
#include <string>

namespace mindsculpt {

// Precondition breaches: bad band edges, dimension mismatch, out-of-range markers.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data that cannot be processed (non-finite samples, malformed files).
class InvalidData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mindsculpt
