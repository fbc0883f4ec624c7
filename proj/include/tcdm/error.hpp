#pragma once

#include <stdexcept>
#include <string>

namespace tcdm {

/// Bad or unreadable input: files, manifests, malformed clouds, bad parameters.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A result that should be impossible given validated inputs.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace tcdm
