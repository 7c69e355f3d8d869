/*
 * Copyright 2026 The qtfuse Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QTFUSE_ERROR_H_
#define QTFUSE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qtfuse {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateScale,
  kDegenerateEnergy,
  kFormat,
  kParse,
  kIo,
  kNotFound,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base exception for every failure surfaced by the library. The code is
// machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the JPEG decoder; carries the offset of the offending byte.
class ParseError : public Error {
 public:
  ParseError(size_t offset, const std::string& message)
      : Error(ErrorCode::kParse,
              message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace qtfuse

#endif  // QTFUSE_ERROR_H_
