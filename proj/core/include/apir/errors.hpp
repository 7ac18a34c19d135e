#pragma once

#include <stdexcept>
#include <string>

namespace apir {

// Caller violated a documented precondition (bad arguments, mixed fields, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically undefined operation, e.g. inverting zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bytes on disk or on the wire do not follow the expected layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input whose values are out of range (element >= p, bad prime).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Connection failure, timeout or an ERROR frame from a peer. Never a Bot verdict.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace apir
