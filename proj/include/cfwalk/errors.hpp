#pragma once

#include <stdexcept>
#include <string>

namespace cfwalk {

// Every error carries the name of the module that raised it so that the CLI
// can print module-tagged diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class AlphabetError : public Error {
 public:
  explicit AlphabetError(const std::string& what) : Error("alphabet-graph", what) {}
};

class KeyError : public Error {
 public:
  explicit KeyError(const std::string& what) : Error("alphabet-graph", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("alphabet-graph", what) {}
};

// Raised when cone types do not stabilize within the configured depth budget.
class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& what) : Error("cone-analyzer", what) {}
};

class GrammarError : public Error {
 public:
  explicit GrammarError(const std::string& what) : Error("grammar-builder", what) {}
};

class SpectralError : public Error {
 public:
  explicit SpectralError(const std::string& what) : Error("genfun-engine", what) {}
};

class ConfigurationError : public Error {
 public:
  ConfigurationError(std::string module, const std::string& what)
      : Error(std::move(module), what) {}
};

class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& what) : Error("walk-validator", what) {}
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error("walk-validator", what) {}
};

}  // namespace cfwalk
