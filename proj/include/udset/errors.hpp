#pragma once

#include <stdexcept>
#include <string>

namespace udset {

// Domain violations of numeric preconditions (negative Bessel argument, x outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed files or schema mismatches.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Work or memory budgets exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate inputs such as zero density where s(r) is undefined.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pattern that cannot be embedded in the requested torus.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace udset

namespace udset {

// A registry graph whose declared edges are not unit length.
class GeometryError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A registry graph whose declared independence number is wrong.
class AlphaMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace udset
