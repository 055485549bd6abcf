// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "graphfuse/errors.hpp"

namespace graphfuse {
namespace {

constexpr std::array<char, 8> kMagic{'G', 'F', 'C', 'K', 'P', 'T', '\0', '\1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw DataError(std::string("checkpoint truncated while reading ") + what);
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void put_double(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

double get_double(std::istream& in) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, "tensor payload"));
}

}  // namespace

void write_checkpoint(std::ostream& out, const TextGraphModel& model, const TrainConfig& train,
                      const TokenVocab& tokens, const LabelVocab& labels) {
  nlohmann::json index = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const Parameter& p : model.params().params()) {
    index.push_back({{"name", p.name}, {"shape", p.value.shape()}, {"offset", offset}});
    offset += p.value.numel();
  }
  const nlohmann::json header = {{"model", to_json(model.config())},
                                 {"train", to_json(train)},
                                 {"tokens", tokens.tokens()},
                                 {"labels", labels.to_json()},
                                 {"tensors", index}};
  const std::string text = header.dump();

  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Parameter& p : model.params().params())
    for (double v : p.value.data()) put_double(out, v);
  if (!out) throw DataError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not a graphfuse checkpoint (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = get_le<std::uint64_t>(in, "header length");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw DataError("checkpoint truncated inside header");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }

  try {
    const ModelConfig config = model_config_from_json(header.at("model"));
    Checkpoint ckpt{train_config_from_json(header.at("train")),
                    TokenVocab(header.at("tokens").get<std::vector<std::string>>()),
                    LabelVocab::from_json(header.at("labels")), TextGraphModel(config, 0)};

    auto& params = ckpt.model.params().params();
    const auto& index = header.at("tensors");
    if (index.size() != params.size()) {
      throw DataError("checkpoint stores " + std::to_string(index.size()) +
                      " tensors but the model has " + std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto name = index[i].at("name").get<std::string>();
      const auto shape = index[i].at("shape").get<Shape>();
      if (name != params[i].name || shape != params[i].value.shape()) {
        throw DataError("checkpoint tensor " + name + " " + shape_str(shape) +
                        " does not match model parameter " + params[i].name + " " +
                        shape_str(params[i].value.shape()));
      }
    }
    for (Parameter& p : params)
      for (double& v : p.value.mutable_data()) v = get_double(in);
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint config rejected: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const TextGraphModel& model,
                     const TrainConfig& train, const TokenVocab& tokens,
                     const LabelVocab& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_checkpoint(out, model, train, tokens, labels);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  try {
    return read_checkpoint(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace graphfuse
