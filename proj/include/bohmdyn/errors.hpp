#pragma once

#include <stdexcept>
#include <string>

namespace bohmdyn {

enum class ErrorKind {
  domain,       // invalid constructor arguments
  singularity,  // configuration on a singular point of the potential or wavefunction
  node,         // density below node_epsilon where Υ⁻¹ is required
  usage,        // operation called on a model or input it does not support
  config,       // malformed run configuration or state id
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

struct SingularityError : Error {
  explicit SingularityError(const std::string& what) : Error(ErrorKind::singularity, what) {}
};

struct NodeError : Error {
  explicit NodeError(const std::string& what) : Error(ErrorKind::node, what) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace bohmdyn
