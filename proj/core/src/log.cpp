// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace semvid {

LogLevel log_threshold() {
  static LogLevel cached = [] {
    const char* env = std::getenv("SEMVID_LOG");
    if (env == nullptr) return LogLevel::off;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
    return LogLevel::off;
  }();
  return cached;
}

void log_message(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) < static_cast<int>(log_threshold())) return;
  if (log_threshold() == LogLevel::off) return;
  const char* tag = "info";
  if (level == LogLevel::debug) tag = "debug";
  if (level == LogLevel::warn) tag = "warn";
  std::fprintf(stderr, "[semvid:%s] %s\n", tag, msg.c_str());
}

}  // namespace semvid
