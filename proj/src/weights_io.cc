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

#include "ctckit/weights_io.h"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace ctckit {
namespace {

bool IsBias(const std::string& name) {
  const std::string tail = name.substr(name.rfind('.') + 1);
  return tail == "b" || tail.starts_with("b_");
}

template <typename T>
void PutLittleEndian(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  template <typename T>
  T Get(const char* what) {
    Need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
               << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string_view Take(std::size_t n, const char* what) {
    Need(n, what);
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

  [[noreturn]] void Fail(const std::string& what) const {
    throw LoadError(origin_, what);
  }

 private:
  void Need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      Fail(std::string("truncated while reading ") + what);
    }
  }

  std::string_view bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_weights(const ParameterSet& params) {
  std::string out(kWeightsMagic, sizeof(kWeightsMagic));
  PutLittleEndian<std::uint32_t>(out, kWeightsVersion);
  PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, value] : params) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw DomainError("tensor name too long: " + name);
    }
    PutLittleEndian<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out += name;
    if (IsBias(name)) {
      out.push_back(1);
      PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(value.rows()));
    } else {
      out.push_back(2);
      PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(value.rows()));
      PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(value.cols()));
    }
    // Matrix is row-major, so data() is already in file order.
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      PutLittleEndian<std::uint64_t>(out,
                                     std::bit_cast<std::uint64_t>(value.data()[i]));
    }
  }
  return out;
}

ParameterSet decode_weights(std::string_view bytes, const std::string& origin) {
  Reader reader(bytes, origin);
  if (reader.Take(4, "magic") != std::string_view(kWeightsMagic, 4)) {
    reader.Fail("bad magic bytes (not a CTCW weights file)");
  }
  const auto version = reader.Get<std::uint32_t>("version");
  if (version != kWeightsVersion) {
    reader.Fail("unsupported format version " + std::to_string(version));
  }
  const auto count = reader.Get<std::uint32_t>("tensor count");
  ParameterSet params;
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto name_len = reader.Get<std::uint16_t>("name length");
    std::string name(reader.Take(name_len, "tensor name"));
    const auto rank = reader.Get<std::uint8_t>("rank");
    if (rank != 1 && rank != 2) {
      reader.Fail("tensor " + name + " has unsupported rank " +
                  std::to_string(rank));
    }
    const auto rows = reader.Get<std::uint32_t>("dimension");
    const std::uint32_t cols = rank == 2 ? reader.Get<std::uint32_t>("dimension")
                                         : 1;
    const std::uint64_t elements = std::uint64_t{rows} * cols;
    if (elements * 8 > bytes.size()) {
      reader.Fail("tensor " + name + " is larger than the file");
    }
    Matrix value(rows, cols);
    for (std::uint64_t i = 0; i < elements; ++i) {
      value.data()[i] =
          std::bit_cast<double>(reader.Get<std::uint64_t>("tensor values"));
    }
    if (!params.emplace(std::move(name), std::move(value)).second) {
      reader.Fail("duplicate tensor name");
    }
  }
  if (!reader.AtEnd()) reader.Fail("trailing bytes after the last tensor");
  return params;
}

void write_weights(const std::filesystem::path& path,
                   const ParameterSet& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write weights");
  const std::string bytes = encode_weights(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

ParameterSet read_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), "cannot open weights file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_weights(buffer.str(), path.string());
}

}  // namespace ctckit
