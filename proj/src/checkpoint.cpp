// Copyright (c) 2026 The StarNav Authors. All Rights Reserved.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "starnav/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "starnav/error.hpp"
#include "starnav/serialization.hpp"

namespace starnav {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'T', 'A', 'R', 'N', 'A', 'V', '\0'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error(ErrorCode::IoError, "checkpoint is truncated");
  return v;
}

void put_tensors(std::ostream& os, const ModelParams<float>& p) {
  p.for_each([&os](const std::string& name, const MatrixX<float>& m) {
    put<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::int32_t>(os, static_cast<std::int32_t>(m.rows()));
    put<std::int32_t>(os, static_cast<std::int32_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
  });
}

void get_tensors(std::istream& is, ModelParams<float>& p) {
  p.for_each([&is](const std::string& name, MatrixX<float>& m) {
    const auto len = get<std::uint16_t>(is);
    std::string stored(len, '\0');
    is.read(stored.data(), len);
    const auto rows = get<std::int32_t>(is);
    const auto cols = get<std::int32_t>(is);
    if (!is || stored != name || rows != m.rows() || cols != m.cols()) {
      throw Error(ErrorCode::ConfigError, "checkpoint tensor '" + stored + "' does not match model tensor '" + name + "'");
    }
    is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    if (!is) throw Error(ErrorCode::IoError, "checkpoint is truncated");
  });
}

}  // namespace

std::uint64_t config_hash(const ModelConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(const std::filesystem::path& path, const TrainState& state, const TrainConfig& train_config) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot write checkpoint " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint64_t>(os, config_hash(state.model.config));
  const std::string header = json{{"model", to_json(state.model.config)}, {"train", to_json(train_config)}}.dump();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(header.size()));
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  put<std::int64_t>(os, state.step);
  put<std::int64_t>(os, state.adam.step);
  put_tensors(os, state.model.params);
  put_tensors(os, state.adam.m);
  put_tensors(os, state.adam.v);
  if (!os) throw Error(ErrorCode::IoError, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw Error(ErrorCode::ConfigError, path.string() + " is not a checkpoint");
  if (get<std::uint32_t>(is) != kCheckpointVersion) throw Error(ErrorCode::ConfigError, "unsupported checkpoint version");
  Checkpoint ck;
  ck.config_hash = get<std::uint64_t>(is);
  std::string header(get<std::uint32_t>(is), '\0');
  is.read(header.data(), static_cast<std::streamsize>(header.size()));
  if (!is) throw Error(ErrorCode::IoError, "checkpoint is truncated");
  const json h = json::parse(header);
  const ModelConfig model_config = model_config_from_json(h.at("model"));
  if (config_hash(model_config) != ck.config_hash) throw Error(ErrorCode::ConfigError, "checkpoint config hash mismatch");
  ck.train_config = train_config_from_json(h.at("train"));
  ck.state = init_train_state(model_config);
  ck.state.step = static_cast<int>(get<std::int64_t>(is));
  ck.state.adam.step = get<std::int64_t>(is);
  get_tensors(is, ck.state.model.params);
  get_tensors(is, ck.state.adam.m);
  get_tensors(is, ck.state.adam.v);
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected) {
  Checkpoint ck = load_checkpoint(path);
  if (!(ck.state.model.config == expected)) {
    throw Error(ErrorCode::ConfigError, "checkpoint model config does not match the requested config");
  }
  return ck;
}

}  // namespace starnav
