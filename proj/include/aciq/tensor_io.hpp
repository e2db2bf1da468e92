/**
 * Copyright 2026 The aciq-toolkit Authors
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

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "aciq/error.hpp"
#include "aciq/quantizer.hpp"
#include "json.hpp"

// On-disk tensor format:
//   line 1:  {"magic":"aciq-tensor-v1","shape":[...],"channel_axis":k,"dtype":"f32le"}\n
//   payload: 4 * product(shape) bytes of little-endian IEEE-754 binary32,
//            channel-major, starting right after the newline.

namespace aciq {

inline constexpr std::string_view kTensorMagic = "aciq-tensor-v1";
inline constexpr std::string_view kTensorDtype = "f32le";

namespace detail {

inline void put_f32le(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xFFu));
}

inline float get_f32le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace detail

/// Serializes to the byte layout above. Values are narrowed to float.
inline std::string encode_tensor(const ChannelTensor& tensor) {
  nlohmann::ordered_json header;
  header["magic"] = kTensorMagic;
  header["shape"] = tensor.shape();
  header["channel_axis"] = tensor.channel_axis();
  header["dtype"] = kTensorDtype;
  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + 4 * tensor.size());
  for (double v : tensor.data()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw Error(ErrorCode::kNonFinite, "tensor holds a non-finite value");
    detail::put_f32le(out, f);
  }
  return out;
}

inline ChannelTensor decode_tensor(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw Error(ErrorCode::kBadHeader, "missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadHeader, std::string("header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) throw Error(ErrorCode::kBadHeader, "header is not a JSON object");
  if (!header.contains("magic") || !header["magic"].is_string() ||
      header["magic"].get<std::string>() != kTensorMagic)
    throw Error(ErrorCode::kBadMagic, "bad magic");
  if (!header.contains("dtype") || header["dtype"] != kTensorDtype)
    throw Error(ErrorCode::kBadHeader, "unsupported dtype");
  if (!header.contains("shape") || !header["shape"].is_array() || header["shape"].empty())
    throw Error(ErrorCode::kBadHeader, "shape must be a non-empty array");
  if (!header.contains("channel_axis") || !header["channel_axis"].is_number_unsigned())
    throw Error(ErrorCode::kBadHeader, "channel_axis must be a non-negative integer");

  std::vector<std::size_t> shape;
  std::size_t count = 1;
  for (const auto& d : header["shape"]) {
    if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0)
      throw Error(ErrorCode::kBadHeader, "shape entries must be positive integers");
    shape.push_back(d.get<std::size_t>());
    count *= shape.back();
  }
  const auto axis = header["channel_axis"].get<std::size_t>();
  if (axis >= shape.size()) throw Error(ErrorCode::kBadHeader, "channel_axis out of range");

  const std::string_view payload = bytes.substr(newline + 1);
  if (payload.size() != 4 * count) throw Error(ErrorCode::kPayloadMismatch, "payload length mismatch");
  std::vector<double> data(count);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < count; ++i) {
    const float f = detail::get_f32le(p + 4 * i);
    if (!std::isfinite(f)) throw Error(ErrorCode::kNonFinite, "tensor holds a non-finite value");
    data[i] = f;
  }
  return ChannelTensor(std::move(shape), axis, std::move(data));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path);
  return bytes;
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

inline ChannelTensor read_tensor(const std::string& path) { return decode_tensor(read_file(path)); }

inline void write_tensor(const ChannelTensor& tensor, const std::string& path) {
  write_file(path, encode_tensor(tensor));
}

}  // namespace aciq
