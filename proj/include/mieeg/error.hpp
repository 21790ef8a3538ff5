#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mieeg {

enum class ErrorCode {
  InvalidArgument,
  EmptyDataset,
  ClassTooSmall,
  ShapeMismatch,
  NonFiniteSample,
  // EPB1 / MDL1 files
  BadMagic,
  UnsupportedVersion,
  TruncatedPayload,
  LabelOutOfRange,
  IoFailure,
  UnknownChannel,
  // preprocess
  TooFewEpochs,
  InvalidBand,
  UnstableDesign,
  NonFiniteOutput,
  SingleChannel,
  // features
  EmptySignal,
  AllZeroSpectrum,
  WindowTooLong,
  ZeroPowerFrame,
  // classifiers
  SingularCovariance,
  ClassAbsent,
  KTooLarge,
  ZeroNormVector,
  DimensionMismatch,
  DivergenceDetected,
  // evaluation
  LengthMismatch,
  AllSubjectsFailed,
  Config,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. The code is stable and meant for
/// programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace mieeg
