#pragma once

#include <stdexcept>
#include <string>

namespace hetmpc {

// Bad argument values: out-of-ring elements, arity or length mismatches.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed circuits (dangling wires, cycles, mixed worlds).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PoolExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HandshakeError : public ProtocolError {
 public:
  HandshakeError(std::string field, const std::string& what)
      : ProtocolError(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ConnectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hetmpc
