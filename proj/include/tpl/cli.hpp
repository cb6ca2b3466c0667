// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tpl::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kPass = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kResource = 3,
};

/// Runs one command. args excludes the program name. Output files go to the
/// directory given by --out (default "tpl_out"); every run writes
/// manifest.json there.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tpl::cli
