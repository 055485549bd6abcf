// SPDX-License-Identifier: Apache-2.0
//
// Small fixtures shared by the unit tests.

#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "graphfuse/model.hpp"
#include "graphfuse/rng.hpp"
#include "graphfuse/tensor.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("graphfuse-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline graphfuse::Tensor random_tensor(graphfuse::Shape shape, graphfuse::Rng& rng,
                                       bool requires_grad = true, double scale = 1.0) {
  std::vector<double> data(graphfuse::numel(shape));
  for (double& v : data) v = scale * rng.normal();
  return graphfuse::Tensor(std::move(shape), std::move(data), requires_grad);
}

/// A full model small enough for exhaustive finite-difference checks.
inline graphfuse::ModelConfig tiny_model_config(std::size_t vocab = 10, std::size_t labels = 3) {
  graphfuse::ModelConfig c;
  c.vocab_size = vocab;
  c.num_labels = labels;
  c.d_emb = 8;
  c.d_model = 8;
  c.enc_layers = 1;
  c.enc_heads = 2;
  c.enc_ff = 16;
  c.gat_hidden = 8;
  c.gat_heads = 2;
  c.dec_heads = 2;
  c.dec_ff = 16;
  return c;
}

}  // namespace testing
