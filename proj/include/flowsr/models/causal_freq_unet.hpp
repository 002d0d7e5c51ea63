#pragma once

#include "flowsr/models/backbone.hpp"

namespace flowsr::models {

// Frequency-pyramid U-net: residual blocks of causal (kf x kt) convs with
// cumulative group norm, stride-2 frequency downsampling per scale and
// transposed-conv upsampling, temporal stride 1 everywhere. F is zero-padded
// up to a multiple of 2^num_scales and cropped back at the output.
struct CausalFreqUnetConfig {
  int bins = 161;
  int num_scales = 5;
  std::vector<int> widths = {8, 16, 24, 32, 40};
  int gn_groups = 4;
  int kernel_f = 3;
  int kernel_t = 2;
  int time_embed_dim = 64;
  double fourier_scale = 16.0;
  double gn_eps = 1e-6;
  uint64_t init_seed = 0xf5eed;

  void validate() const;
  int padded_bins() const;
  util::KvConfig to_config() const;
  static CausalFreqUnetConfig from_config(const util::KvConfig& kv);
};

class CausalFreqUnet final : public Backbone {
 public:
  explicit CausalFreqUnet(const CausalFreqUnetConfig& cfg);
  ~CausalFreqUnet() override;

  std::string kind() const override { return "causal_freq_unet"; }
  int bins() const override { return cfg_.bins; }
  nn::Var forward_train(nn::Tape& tape, const nn::Tensor& xt, const nn::Tensor& cond,
                        double t) override;
  nn::Tensor forward(const nn::Tensor& xt, const nn::Tensor& cond, double t) const override;
  std::unique_ptr<BackboneStream> open_stream(double t) const override;
  std::vector<nn::Parameter*> parameters() override;
  std::vector<LayerInfo> layer_infos() const override;
  util::KvConfig config() const override { return cfg_.to_config(); }

  const CausalFreqUnetConfig& unet_config() const { return cfg_; }

  struct Impl;  // shared with the streaming context

 private:
  CausalFreqUnetConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flowsr::models
