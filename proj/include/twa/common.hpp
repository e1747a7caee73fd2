#pragma once

#include <complex>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace twa {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class ErrorKind {
  InvalidDimension,
  InvalidArgument,
  NonHermitian,
  Divergence,
  Truncation,
  NonConvergence,
  StepSize,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Non-fatal numerical conditions (coherent tails, grid boundary leaks, ...).
/// Shared between worker threads, so every access is locked.
struct Warning {
  std::string kind;
  std::string message;
};

class WarningLog {
 public:
  void add(std::string kind, std::string message);
  std::vector<Warning> entries() const;
  bool contains(const std::string& kind) const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Warning> entries_;
};

inline void warn(WarningLog* log, std::string kind, std::string message) {
  if (log != nullptr) log->add(std::move(kind), std::move(message));
}

}  // namespace twa
