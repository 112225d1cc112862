// Copyright 2026 The emvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMVC__COMMON__BINARY_IO_HPP_
#define EMVC__COMMON__BINARY_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emvc
{

// Little-endian byte sink used by the checkpoint and shard formats.
class ByteWriter
{
public:
  void put_u8(std::uint8_t v);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f32(float v);
  void put_f64(double v);
  void put_bytes(std::string_view bytes);
  // u32 length followed by the raw bytes.
  void put_string(std::string_view s);

  const std::string & bytes() const { return buffer_; }
  std::string take() { return std::move(buffer_); }

private:
  std::string buffer_;
};

// Bounds-checked little-endian reader; every overrun throws FormatError.
class ByteReader
{
public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  float get_f32();
  double get_f64();
  std::string_view get_bytes(std::size_t n);
  std::string get_string();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

private:
  void require(std::size_t n) const;

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path & path);
void write_file(const std::filesystem::path & path, std::string_view bytes);

}  // namespace emvc

#endif  // EMVC__COMMON__BINARY_IO_HPP_
