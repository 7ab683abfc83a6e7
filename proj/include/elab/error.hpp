#pragma once

#include <stdexcept>
#include <string>

namespace elab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value failed. `path()`
/// names the offending field (e.g. "scales.beta") when one is known.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string path = {})
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The grid is too coarse to represent a scaled object.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, int required_n)
      : Error(what), required_n_(required_n) {}
  int required_n() const noexcept { return required_n_; }

 private:
  int required_n_;
};

/// Explicit time step violates the stability limit.
class CflError : public Error {
 public:
  CflError(const std::string& what, double admissible_dt)
      : Error(what), admissible_dt_(admissible_dt) {}
  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// Requested object does not fit the configured memory cap.
class MemoryBudgetError : public Error {
 public:
  MemoryBudgetError(const std::string& what, std::size_t required)
      : Error(what), required_(required) {}
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

}  // namespace elab
