#pragma once

#include <stdexcept>
#include <string>

namespace qfhc {

// Precondition violated by the caller (bad parameter, empty family, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operands live on different index domains (unilateral vs bilateral), or a
// weight family is used on a domain it is not defined on.
class DomainMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A configured cap (horizon, support size) would be exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qfhc
