#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flowsr/nn/tensor.hpp"
#include "flowsr/util/kv_config.hpp"

namespace flowsr::nn {

// Self-contained binary snapshot: named parameter table plus the config echo
// needed to rebuild the model, the training seed, and (optionally) optimizer
// moments for exact resume. Little-endian throughout; files are written to a
// temp name and renamed so readers never see partial state.
struct CheckpointData {
  uint64_t seed = 0;
  util::KvConfig config;
  std::vector<std::pair<std::string, Tensor>> params;
  bool has_optimizer = false;
  uint64_t optimizer_step = 0;
  std::vector<Tensor> optimizer_m;
  std::vector<Tensor> optimizer_v;
};

void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);  // throws DataError when corrupt

}  // namespace flowsr::nn
