#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ffdist {

enum class ErrorKind {
  kCompositeModulus,
  kOrderDoesNotDivide,
  kInvalidArgument,
  kFieldMismatch,
  kHypothesisViolated,
  kZeroCoefficient,
  kDimensionTooLarge,
  kDimensionMismatch,
  kZeroRadius,
  kZeroFrequency,
  kSizeTooLarge,
  kEmptySet,
  kAmbientMismatch,
  kInvalidConfig,
  kParse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kCompositeModulus: return "CompositeModulus";
    case ErrorKind::kOrderDoesNotDivide: return "OrderDoesNotDivide";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kFieldMismatch: return "FieldMismatch";
    case ErrorKind::kHypothesisViolated: return "HypothesisViolated";
    case ErrorKind::kZeroCoefficient: return "ZeroCoefficient";
    case ErrorKind::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kZeroRadius: return "ZeroRadius";
    case ErrorKind::kZeroFrequency: return "ZeroFrequency";
    case ErrorKind::kSizeTooLarge: return "SizeTooLarge";
    case ErrorKind::kEmptySet: return "EmptySet";
    case ErrorKind::kAmbientMismatch: return "AmbientMismatch";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kParse: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace ffdist
