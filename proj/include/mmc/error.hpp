#pragma once

#include <stdexcept>
#include <string>

namespace mmc {

/// Input that does not describe a well-formed clone structure, address or
/// configuration. The CLI maps this to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation could not complete (reducible matrix, non-convergence,
/// resource caps). The CLI maps this to exit status 2.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmc
