// Copyright 2026 The tepolab Authors.
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

#include "tepo/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "tepo/error.hpp"

namespace tepo {
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'E', 'P', 'O', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

void WriteU32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t ReadU32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

CheckpointHeader ReadHeader(std::ifstream& in, const std::filesystem::path& path) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw Error(ErrorCode::kIo, path.string() + ": not a checkpoint file");
  }
  CheckpointHeader h;
  h.version = ReadU32(in);
  h.vocab_size = ReadU32(in);
  h.num_keys = ReadU32(in);
  h.num_tools = ReadU32(in);
  h.rows = ReadU32(in);
  h.cols = ReadU32(in);
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": truncated header");
  if (h.version != kCheckpointVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                path.string() + ": unsupported checkpoint version " +
                    std::to_string(h.version));
  }
  return h;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Policy& policy,
                     const PolicyParams& params) {
  if (params.rows != policy.vocab_size() || params.cols != policy.feature_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "parameters do not match the policy shape");
  }
  if (!params.all_finite()) {
    throw Error(ErrorCode::kNonFinite, "refusing to save non-finite parameters");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  WriteU32(out, kCheckpointVersion);
  WriteU32(out, static_cast<std::uint32_t>(policy.vocab_size()));
  WriteU32(out, static_cast<std::uint32_t>(policy.vocab().num_keys()));
  WriteU32(out, static_cast<std::uint32_t>(policy.vocab().num_tools()));
  WriteU32(out, static_cast<std::uint32_t>(params.rows));
  WriteU32(out, static_cast<std::uint32_t>(params.cols));
  out.write(reinterpret_cast<const char*>(params.weights.data()),
            static_cast<std::streamsize>(params.weights.size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  return ReadHeader(in, path);
}

PolicyParams load_checkpoint(const std::filesystem::path& path, const Policy& policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  const CheckpointHeader h = ReadHeader(in, path);
  if (h.vocab_size != static_cast<std::uint32_t>(policy.vocab_size()) ||
      h.num_keys != static_cast<std::uint32_t>(policy.vocab().num_keys()) ||
      h.num_tools != static_cast<std::uint32_t>(policy.vocab().num_tools()) ||
      h.rows != static_cast<std::uint32_t>(policy.vocab_size()) ||
      h.cols != static_cast<std::uint32_t>(policy.feature_dim())) {
    throw Error(ErrorCode::kShapeMismatch,
                path.string() + ": checkpoint architecture does not match config");
  }
  PolicyParams p(static_cast<int>(h.rows), static_cast<int>(h.cols));
  in.read(reinterpret_cast<char*>(p.weights.data()),
          static_cast<std::streamsize>(p.weights.size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": truncated weights");
  return p;
}

}  // namespace tepo
