#pragma once

#include <vector>

#include "flowsr/nn/tensor.hpp"

namespace flowsr::train {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Moments are exposed for
// checkpointing; restoring them plus the step counter resumes bit-exactly.
class Adam {
 public:
  Adam() = default;
  Adam(const std::vector<nn::Parameter*>& params, const AdamConfig& cfg);

  void step(const std::vector<nn::Parameter*>& params);

  int64_t step_count() const { return step_; }
  const std::vector<nn::Tensor>& moments_m() const { return m_; }
  const std::vector<nn::Tensor>& moments_v() const { return v_; }
  void restore(int64_t step_count, std::vector<nn::Tensor> m, std::vector<nn::Tensor> v);
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  int64_t step_ = 0;
  std::vector<nn::Tensor> m_, v_;
};

}  // namespace flowsr::train
