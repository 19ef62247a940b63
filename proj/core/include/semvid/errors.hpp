// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace semvid {

// Exit codes used by the CLI. Library code throws; the tool maps the
// exception type to the process exit status.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
  kExitBudget = 4,
};

// Invalid argument values, malformed shapes, non-finite inputs.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// File-system failures and malformed file contents.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Retention budget that cannot satisfy the per-frame context floor.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const BudgetError*>(&e)) return kExitBudget;
  return kExitValidation;
}

}  // namespace semvid
