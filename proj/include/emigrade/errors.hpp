#pragma once

#include <stdexcept>
#include <string>

namespace emigrade {

// Malformed or missing input data (files, manifests, shape mismatches across
// serialised artefacts). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during training (NaN/Inf loss). CLI maps this to exit
// code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emigrade
