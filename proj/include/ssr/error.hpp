// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <stdexcept>
#include <string>

namespace ssr {

enum class ErrorKind {
  invalid_argument,   // caller broke a precondition
  malformed_document, // input bytes do not match the expected format
  validation,         // well-formed input violating a domain invariant
  missing_gold,       // operation needs a gold label the task does not carry
  transport,          // remote endpoint unreachable or kept failing
  provider,           // distance provider could not produce a value
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ssr
