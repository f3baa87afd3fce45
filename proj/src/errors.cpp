// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/errors.hpp"

namespace ecgrob {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroNoisePower: return "ZeroNoisePower";
    case ErrorCode::ZeroSignalPower: return "ZeroSignalPower";
    case ErrorCode::BankTooShort: return "BankTooShort";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::MissingLead: return "MissingLead";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::TooFewRecords: return "TooFewRecords";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::IdMismatch: return "IdMismatch";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail, const std::string& id,
                    const std::string& stage) {
  std::string out(to_string(code));
  if (!stage.empty()) out += " [" + stage + "]";
  if (!id.empty()) out += " (record " + id + ")";
  out += ": " + detail;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string record_id,
             std::string stage)
    : std::runtime_error(compose(code, message, record_id, stage)),
      code_(code),
      detail_(message),
      record_id_(std::move(record_id)),
      stage_(std::move(stage)) {}

Error Error::with_context(std::string stage, std::string record_id) const {
  return Error(code_, detail_, record_id.empty() ? record_id_ : std::move(record_id),
               stage.empty() ? stage_ : std::move(stage));
}

}  // namespace ecgrob
