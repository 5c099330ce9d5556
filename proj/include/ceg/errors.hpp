#pragma once

#include <stdexcept>
#include <string>

namespace ceg {

// Malformed or inconsistent input data: bad records, invalid priors or
// hyperstages, schema violations in model files.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evidence that no root-to-sink path can satisfy.
class ContradictoryEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ceg
