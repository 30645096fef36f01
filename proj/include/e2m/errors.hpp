#pragma once

#include <stdexcept>
#include <string>

namespace e2m {

// Numeric values are shared with the C API status codes.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Config = 2,
  NotConverged = 3,
  Degenerate = 4,
  Io = 5,
  SchemeInvalid = 6,
  TotalConflict = 7,
  ComponentStarved = 8,
  Internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorCode::InvalidArgument, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::Config, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::Io, w) {}
};
struct SchemeInvalid : Error {
  explicit SchemeInvalid(const std::string& w) : Error(ErrorCode::SchemeInvalid, w) {}
};
struct TotalConflict : Error {
  explicit TotalConflict(const std::string& w) : Error(ErrorCode::TotalConflict, w) {}
};

// Raised when the likelihood or a posterior row collapses to zero mass.
struct DegenerateEstimation : Error {
  DegenerateEstimation(const std::string& w, std::size_t record)
      : Error(ErrorCode::Degenerate, w), record_(record) {}
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

struct ComponentStarved : Error {
  ComponentStarved(const std::string& w, std::size_t component)
      : Error(ErrorCode::ComponentStarved, w), component_(component) {}
  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

}  // namespace e2m
