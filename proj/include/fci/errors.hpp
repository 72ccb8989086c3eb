#ifndef FCI_ERRORS_HPP
#define FCI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fci {

// A symmetric system whose pivots fall below tolerance; typically a covariate
// that is a linear combination of the others.
class singular_design_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration would exceed the configured guard.
class enumeration_limit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened or written.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fci

#endif
