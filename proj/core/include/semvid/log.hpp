// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace semvid {

enum class LogLevel { debug = 0, info = 1, warn = 2, off = 3 };

// Threshold comes from the SEMVID_LOG environment variable
// (debug|info|warn); unset or unrecognized values disable logging.
// All log output goes to stderr so stdout stays machine-readable.
LogLevel log_threshold();

void log_message(LogLevel level, const std::string& msg);

inline void log_debug(const std::string& msg) { log_message(LogLevel::debug, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::info, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::warn, msg); }

}  // namespace semvid
