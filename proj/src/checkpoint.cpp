/*
 * Copyright 2026 The GraphSANN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "graphsann/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "graphsann/errors.hpp"

namespace graphsann {
namespace {

constexpr char kMagic[8] = {'G', 'S', 'A', 'N', 'N', 'C', 'K', '1'};
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 32;

void put_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, sizeof buf);
}

void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

  void bytes(char* out, std::size_t n) {
    if (!is_.read(out, static_cast<std::streamsize>(n))) {
      throw IngestionError(path_ + ": truncated checkpoint");
    }
  }
  std::uint64_t u64() {
    unsigned char buf[8];
    bytes(reinterpret_cast<char*>(buf), sizeof buf);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    return v;
  }
  std::uint64_t length() {
    const std::uint64_t n = u64();
    if (n > kMaxLength) throw IngestionError(path_ + ": corrupt length field in checkpoint");
    return n;
  }
  std::string string() {
    std::string s(length(), '\0');
    bytes(s.data(), s.size());
    return s;
  }

 private:
  std::istream& is_;
  std::string path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  put_string(os, ckpt.hyperparameters);
  put_u64(os, ckpt.arrays.size());
  for (const NamedArray& a : ckpt.arrays) {
    put_string(os, a.name);
    put_u64(os, static_cast<std::uint64_t>(a.value.rows()));
    put_u64(os, static_cast<std::uint64_t>(a.value.cols()));
    for (ad::Index i = 0; i < a.value.size(); ++i) {
      put_u64(os, std::bit_cast<std::uint64_t>(a.value.data()[i]));
    }
  }
  if (!os) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestionError("cannot open checkpoint " + path.string());
  Reader in(is, path.string());
  char magic[sizeof kMagic];
  in.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IngestionError(path.string() + ": not a GraphSANN checkpoint");
  }
  Checkpoint ckpt;
  ckpt.hyperparameters = in.string();
  const std::uint64_t count = in.length();
  for (std::uint64_t k = 0; k < count; ++k) {
    NamedArray a;
    a.name = in.string();
    const std::uint64_t rows = in.length(), cols = in.length();
    if (rows * cols > kMaxLength) throw IngestionError(path.string() + ": array too large");
    a.value.resize(static_cast<ad::Index>(rows), static_cast<ad::Index>(cols));
    for (ad::Index i = 0; i < a.value.size(); ++i) a.value.data()[i] = std::bit_cast<double>(in.u64());
    ckpt.arrays.push_back(std::move(a));
  }
  return ckpt;
}

Checkpoint snapshot_parameters(std::span<ad::Parameter* const> params, std::string hyperparameters) {
  Checkpoint ckpt{std::move(hyperparameters), {}};
  for (const ad::Parameter* p : params) ckpt.arrays.push_back({p->name, p->value});
  return ckpt;
}

void restore_parameters(const Checkpoint& ckpt, std::span<ad::Parameter* const> params) {
  std::unordered_map<std::string, const ad::Matrix*> by_name;
  for (const NamedArray& a : ckpt.arrays) by_name[a.name] = &a.value;
  for (ad::Parameter* p : params) {
    const auto it = by_name.find(p->name);
    if (it == by_name.end()) throw ContractError("checkpoint has no array named " + p->name);
    if (it->second->rows() != p->rows() || it->second->cols() != p->cols()) {
      throw ContractError("checkpoint shape mismatch for " + p->name);
    }
    p->value = *it->second;
  }
}

}  // namespace graphsann
