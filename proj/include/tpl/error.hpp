// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpl {

enum class ErrorCode {
  InvalidArgument,
  CapOverflow,
  AmbiguousEigenspace,
  ResolutionUnstable,
  NoConvergence,
  DegenerateInput,
  IndivisibleResolution,
  NotAnnular,
  SolverDiverged,
  InvalidPartition,
  HypothesisNotMet,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every recoverable failure carries a code so that
/// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace tpl
