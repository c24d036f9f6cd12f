#pragma once

#include <stdexcept>
#include <string>

namespace qg {

/// Malformed input files or descriptions.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root finding, nullity extraction or tracking could not produce a result.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An eigenpair violates a non-degeneracy requirement of the requested check.
class GenericityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested energy level lies in the spectrum of the decoupled operator.
class IllDefinedLevel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qg
