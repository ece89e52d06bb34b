#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neuroramp {

// Stable error taxonomy for the whole signal chain, so tests and tools can
// match on the condition rather than the message text.
enum class Errc {
  kInvalidConfig,
  kPeriodOverrun,
  kIndexOverflow,
  kCapacityExceeded,
  kUnknownAddress,
  kBadPreamble,
  kBadCrc,
  kTruncatedFrame,
  kInvalidChipPair,
  kDegenerateCovariance,
  kEmptyGrid,
  kEmptyHistogram,
  kZeroRate,
  kUnlabeledTraining,
  kLengthMismatch,
  kIoError,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

  Error(Errc code, const std::string& message, std::size_t offset = kNoOffset)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        offset_(offset) {}

  Errc code() const noexcept { return code_; }

  // Position (chip, byte, ...) the failure was detected at, when meaningful.
  std::size_t offset() const noexcept { return offset_; }

 private:
  Errc code_;
  std::size_t offset_;
};

}  // namespace neuroramp
