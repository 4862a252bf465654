// Error taxonomy shared by the whole library.
//
// InputError   — malformed arguments (bad multi-index, shape mismatch, config).
// RangeError   — structurally valid input outside an operation's domain
//                (degree overflow, unsupported (n,p,q) range, division by a
//                vanishing coefficient).
// NumericError — runtime numerical failure (non-SPD metric, singular solve).
#pragma once

#include <stdexcept>
#include <string>

namespace curv {

class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

class RangeError : public std::domain_error {
 public:
  explicit RangeError(const std::string& what) : std::domain_error(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace curv
