#pragma once

#include <stdexcept>
#include <string>

namespace fml {

// Invalid user input: wrong dimensions, out-of-domain parameters, unreadable files.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometric singularities where an operation is undefined: logarithm at a cut
// point, antipodal pairs on the sphere.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fml
