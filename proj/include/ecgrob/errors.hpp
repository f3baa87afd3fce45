// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecgrob {

enum class ErrorCode {
  InvalidArgument,
  MissingFile,
  ParseError,
  InvariantViolation,
  IoError,
  EmptySignal,
  SignalTooShort,
  InvalidSpec,
  LengthMismatch,
  ZeroNoisePower,
  ZeroSignalPower,
  BankTooShort,
  VariantMismatch,
  MissingLead,
  InvalidBand,
  DegenerateImage,
  TooFewRecords,
  MissingClass,
  IdMismatch,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported as ecgrob::Error. `record_id` is set
// when the failure can be attributed to a single record; `stage` names the
// pipeline stage that raised it (empty for direct calls).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string record_id = {},
        std::string stage = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& record_id() const noexcept { return record_id_; }
  const std::string& stage() const noexcept { return stage_; }

  // Same error, annotated with a stage name and/or record id.
  Error with_context(std::string stage, std::string record_id = {}) const;

 private:
  ErrorCode code_;
  std::string detail_;
  std::string record_id_;
  std::string stage_;
};

}  // namespace ecgrob
