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

#include "emvc/common/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "emvc/common/error.hpp"

namespace emvc
{

static_assert(std::endian::native == std::endian::little, "little-endian host required");

void ByteWriter::put_u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }

void ByteWriter::put_u32(std::uint32_t v)
{
  char raw[4];
  std::memcpy(raw, &v, 4);
  buffer_.append(raw, 4);
}

void ByteWriter::put_u64(std::uint64_t v)
{
  char raw[8];
  std::memcpy(raw, &v, 8);
  buffer_.append(raw, 8);
}

void ByteWriter::put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_bytes(std::string_view bytes) { buffer_.append(bytes); }

void ByteWriter::put_string(std::string_view s)
{
  put_u32(static_cast<std::uint32_t>(s.size()));
  put_bytes(s);
}

void ByteReader::require(std::size_t n) const
{
  if (n > remaining()) {
    throw FormatError(
      "truncated input: need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
      ", have " + std::to_string(remaining()));
  }
}

std::uint8_t ByteReader::get_u8()
{
  require(1);
  return static_cast<std::uint8_t>(bytes_[pos_++]);
}

std::uint32_t ByteReader::get_u32()
{
  require(4);
  std::uint32_t v;
  std::memcpy(&v, bytes_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64()
{
  require(8);
  std::uint64_t v;
  std::memcpy(&v, bytes_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

float ByteReader::get_f32() { return std::bit_cast<float>(get_u32()); }

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::string_view ByteReader::get_bytes(std::size_t n)
{
  require(n);
  auto out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::get_string()
{
  const auto n = get_u32();
  return std::string(get_bytes(n));
}

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path & path, std::string_view bytes)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("short write to " + path.string());
  }
}

}  // namespace emvc
