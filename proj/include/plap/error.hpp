#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plap {

enum class ErrorKind {
  Domain,
  NoRealRoot,
  StepFailure,
  SingularRatio,
  NoSeparatrix,
  BlowUp,
  HitZero,
  IllConditioned,
  OutOfRange,
  NoConvergence,
  NotPositive,
  Config,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::SingularRatio: return "SingularRatio";
    case ErrorKind::NoSeparatrix: return "NoSeparatrix";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::HitZero: return "HitZero";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace plap
