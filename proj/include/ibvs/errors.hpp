#pragma once

#include <stdexcept>
#include <string>

namespace ibvs {

// Tangent correction in the strapdown->gimbal conversion left its valid range.
class SingularityError : public std::domain_error {
 public:
  explicit SingularityError(const std::string& msg) : std::domain_error(msg) {}
};

// A solve was requested at a state where the decrease condition is infeasible
// (the relevant image coordinate is exactly zero).
class DegenerateStateError : public std::domain_error {
 public:
  explicit DegenerateStateError(const std::string& msg)
      : std::domain_error(msg) {}
};

// Training loss became non-finite.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model file could not be loaded.
class ModelLoadError : public std::runtime_error {
 public:
  enum class Kind { io, corrupt, bad_version, bad_shape };

  ModelLoadError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Bad configuration value (CLI or config file).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace ibvs
