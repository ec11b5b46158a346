#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

/// Coarse failure category; the CLI maps each one to its own exit code.
enum class ErrorCategory {
  config,
  geometry,
  propagation,
  numerical,
  io,
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::geometry: return "geometry";
    case ErrorCategory::propagation: return "propagation";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

inline void require(bool condition, ErrorCategory category, const std::string& what) {
  if (!condition) throw Error(category, what);
}

}  // namespace wgqed
