#pragma once

#include <stdexcept>
#include <string>

namespace maxcorr {

/// Bad user-supplied data or arguments (malformed CSV, invalid config).
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maxcorr
