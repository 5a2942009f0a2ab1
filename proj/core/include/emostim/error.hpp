// Copyright 2026 The emostim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace emostim {

/// Broad failure class. The CLI maps these onto its exit codes, so keep the
/// set small and stable.
enum class ErrorKind {
  kData,     // bad input files, schema violations, precondition failures
  kConfig,   // missing credentials, unusable configuration
  kNetwork,  // remote endpoint unreachable after retries
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Schema or invariant violation; carries the offending file and field so
/// messages can point at the exact spot.
class ValidationError : public Error {
 public:
  ValidationError(std::string file, std::string field, std::string reason)
      : Error(ErrorKind::kData, Format(file, field, reason)),
        file_(std::move(file)),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  explicit ValidationError(const std::string& reason)
      : ValidationError("", "", reason) {}

  const std::string& file() const noexcept { return file_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  static std::string Format(const std::string& file, const std::string& field,
                            const std::string& reason) {
    std::string out;
    if (!file.empty()) out += file + ": ";
    if (!field.empty()) out += field + ": ";
    out += reason;
    return out;
  }

  std::string file_;
  std::string field_;
  std::string reason_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::kConfig, message) {}
};

class NetworkError : public Error {
 public:
  NetworkError(const std::string& message, int attempts)
      : Error(ErrorKind::kNetwork, message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

}  // namespace emostim
