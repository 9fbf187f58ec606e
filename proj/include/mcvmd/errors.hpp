#pragma once

#include <stdexcept>
#include <string>

namespace mcvmd {

// Malformed or inconsistent caller input (bad lengths, rates, indices, names).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation produced or received non-finite values.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcvmd
