// SPDX-License-Identifier: Apache-2.0
//
// Versioned checkpoint container.
//
//   bytes 0..7    magic "GFCKPT\0\1"
//   u32           format version
//   u64           header length in bytes
//   header        UTF-8 JSON: model/train configs, vocabularies, and a tensor
//                 index [{name, shape, offset}] with offsets in values
//   payload       row-major float64 values, little-endian
//
// Loading rebuilds the model from the stored config and then requires the
// stored tensor names and shapes to match the rebuilt parameters exactly.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "graphfuse/model.hpp"
#include "graphfuse/trainer.hpp"
#include "graphfuse/vocab.hpp"

namespace graphfuse {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig train;
  TokenVocab tokens;
  LabelVocab labels;
  TextGraphModel model;
};

void write_checkpoint(std::ostream& out, const TextGraphModel& model, const TrainConfig& train,
                      const TokenVocab& tokens, const LabelVocab& labels);
/// DataError on a bad magic, unknown version, truncated payload, or a
/// tensor index that disagrees with the model described by the header.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const TextGraphModel& model,
                     const TrainConfig& train, const TokenVocab& tokens,
                     const LabelVocab& labels);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace graphfuse
