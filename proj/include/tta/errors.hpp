#pragma once

#include <stdexcept>
#include <string>

namespace tta {

/// Failure categories; the CLI maps each one to its own exit code.
enum class ErrorCategory {
  Domain = 2,     // value outside its mathematical domain (e.g. |lat| > 90)
  Ordering = 3,   // timestamps out of order / negative time steps
  Config = 4,     // invalid configuration value
  Parse = 5,      // malformed input file
  Numeric = 6,    // singular or ill-conditioned matrix
  Staleness = 7,  // host pose too old for a V2V record
  Coverage = 8,   // truth / result tick sets disagree
  Io = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::Domain, what) {}
};

class OrderingError : public Error {
 public:
  explicit OrderingError(const std::string& what) : Error(ErrorCategory::Ordering, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCategory::Parse, what) {}
};

class NumericError : public Error {
 public:
  NumericError(const std::string& what, double rcond)
      : Error(ErrorCategory::Numeric, what), rcond_(rcond) {}

  /// Reciprocal condition estimate of the offending matrix.
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

class StalenessError : public Error {
 public:
  StalenessError(const std::string& what, double record_t, double pose_t)
      : Error(ErrorCategory::Staleness, what), record_t_(record_t), pose_t_(pose_t) {}

  double record_time() const noexcept { return record_t_; }
  double pose_time() const noexcept { return pose_t_; }

 private:
  double record_t_;
  double pose_t_;
};

class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& what) : Error(ErrorCategory::Coverage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace tta
