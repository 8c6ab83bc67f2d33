#pragma once

#include <stdexcept>
#include <string>

namespace galaxy {

// Base for everything the library throws on a broken precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Zero-length direction, coincident line endpoints, and similar.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

}  // namespace galaxy
