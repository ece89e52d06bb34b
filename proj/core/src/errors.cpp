#include "neuroramp/errors.hpp"

namespace neuroramp {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kPeriodOverrun: return "PeriodOverrun";
    case Errc::kIndexOverflow: return "IndexOverflow";
    case Errc::kCapacityExceeded: return "CapacityExceeded";
    case Errc::kUnknownAddress: return "UnknownAddress";
    case Errc::kBadPreamble: return "BadPreamble";
    case Errc::kBadCrc: return "BadCrc";
    case Errc::kTruncatedFrame: return "TruncatedFrame";
    case Errc::kInvalidChipPair: return "InvalidChipPair";
    case Errc::kDegenerateCovariance: return "DegenerateCovariance";
    case Errc::kEmptyGrid: return "EmptyGrid";
    case Errc::kEmptyHistogram: return "EmptyHistogram";
    case Errc::kZeroRate: return "ZeroRate";
    case Errc::kUnlabeledTraining: return "UnlabeledTraining";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kIoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace neuroramp
