#pragma once

#include <stdexcept>
#include <string>

namespace swat {

// Unreadable or malformed input: missing files, missing columns, bad rows.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A loss or parameter became non-finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swat
