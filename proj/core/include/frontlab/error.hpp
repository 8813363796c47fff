#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

/// Base for every error raised by the library. Carries a short machine tag
/// alongside the human-readable message so drivers can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& message)
      : std::runtime_error(message), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

/// Input violated a documented precondition (non-finite samples, nonzero
/// mean passed to an inversion, mismatched grids, ...).
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& message) : Error("invalid-input", message) {}
};

}  // namespace frontlab
