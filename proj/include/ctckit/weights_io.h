/* Copyright 2026 The ctckit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Binary weights file (.ctcw). All integers and floats little-endian:
//
//   "CTCW"                        4 bytes
//   format version   u32          currently 1
//   tensor count     u32
//   per tensor:
//     name length    u16
//     name           UTF-8 bytes
//     rank           u8           1 for biases, 2 for weight matrices
//     dims           u32 x rank
//     values         f64 x prod(dims), row-major

#ifndef CTCKIT_WEIGHTS_IO_H_
#define CTCKIT_WEIGHTS_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ctckit/net.h"

namespace ctckit {

inline constexpr char kWeightsMagic[4] = {'C', 'T', 'C', 'W'};
inline constexpr std::uint32_t kWeightsVersion = 1;

std::string encode_weights(const ParameterSet& params);

// `origin` names the source in LoadError messages.
ParameterSet decode_weights(std::string_view bytes, const std::string& origin);

void write_weights(const std::filesystem::path& path,
                   const ParameterSet& params);
ParameterSet read_weights(const std::filesystem::path& path);

}  // namespace ctckit

#endif  // CTCKIT_WEIGHTS_IO_H_
