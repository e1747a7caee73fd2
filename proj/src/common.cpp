#include "twa/common.hpp"

#include <algorithm>

namespace twa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NonHermitian: return "non-hermitian";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::StepSize: return "step-size";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void WarningLog::add(std::string kind, std::string message) {
  std::lock_guard lock(mutex_);
  entries_.push_back({std::move(kind), std::move(message)});
}

std::vector<Warning> WarningLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

bool WarningLog::contains(const std::string& kind) const {
  std::lock_guard lock(mutex_);
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Warning& w) { return w.kind == kind; });
}

std::size_t WarningLog::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace twa
