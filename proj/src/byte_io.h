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

#ifndef QTFUSE_SRC_BYTE_IO_H_
#define QTFUSE_SRC_BYTE_IO_H_

// Little-endian helpers for the binary embedding and model formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtfuse/error.h"

namespace qtfuse::internal {

class ByteWriter {
 public:
  void Tag(std::string_view tag) { bytes_.insert(bytes_.end(), tag.begin(), tag.end()); }
  void U16(uint16_t v) {
    bytes_.push_back(v & 0xFF);
    bytes_.push_back(v >> 8);
  }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back((v >> (8 * i)) & 0xFF);
  }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void String16(std::string_view s) {
    if (s.size() > UINT16_MAX) Fail(ErrorCode::kInvalidArgument, "string too long");
    U16(static_cast<uint16_t>(s.size()));
    Tag(s);
  }
  void String32(std::string_view s) {
    U32(static_cast<uint32_t>(s.size()));
    Tag(s);
  }
  std::vector<uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
};

// Bounds-checked reader; running off the end is a kFormat error naming
// `what` and the offset.
class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  size_t offset() const { return pos_; }
  size_t remaining() const { return bytes_.size() - pos_; }
  bool AtEnd() const { return pos_ == bytes_.size(); }

  void Need(size_t n) const {
    if (remaining() < n) {
      Fail(ErrorCode::kFormat, what_ + ": truncated at byte " + std::to_string(pos_));
    }
  }
  bool PeekTag(std::string_view tag) const {
    return remaining() >= tag.size() &&
           std::memcmp(bytes_.data() + pos_, tag.data(), tag.size()) == 0;
  }
  void ExpectTag(std::string_view tag) {
    if (!PeekTag(tag)) {
      Fail(ErrorCode::kFormat, what_ + ": expected '" + std::string(tag) +
                                   "' at byte " + std::to_string(pos_));
    }
    pos_ += tag.size();
  }
  uint16_t U16() {
    Need(2);
    const uint16_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string Bytes(size_t n) {
    Need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::string String16() { return Bytes(U16()); }
  std::string String32() { return Bytes(U32()); }

  [[noreturn]] void Error(const std::string& msg) const {
    Fail(ErrorCode::kFormat, what_ + ": " + msg + " (at byte " + std::to_string(pos_) + ")");
  }

 private:
  std::span<const uint8_t> bytes_;
  std::string what_;
  size_t pos_ = 0;
};

}  // namespace qtfuse::internal

#endif  // QTFUSE_SRC_BYTE_IO_H_
