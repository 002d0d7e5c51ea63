#pragma once

#include <optional>

#include "flowsr/models/backbone.hpp"

namespace flowsr::models {

// 1-d U-net over spectrogram channels: encoder of depthwise-separable causal
// tanh-GLU blocks (kernel 2, optionally dilation-doubled), a kernel-7 GLU
// bottleneck, a decoder of plain 1x1 GLUs with no temporal receptive field,
// and 1x1 linear skips from each encoder feature to the matching decoder
// feature. The temporal receptive field therefore comes entirely from the
// encoder stack and the bottleneck.
struct ConvGluUnetConfig {
  int bins = 161;
  std::vector<int> encoder_channels = {32, 16, 8};
  int encoder_kernel = 2;
  int bottleneck_kernel = 7;
  bool dilation_doubling = true;  // encoder level i runs at dilation 2^i
  int time_embed_dim = 64;
  double fourier_scale = 16.0;
  uint64_t init_seed = 0x5eed;

  void validate() const;  // throws; logs a warning for non-decreasing channels
  util::KvConfig to_config() const;
  static ConvGluUnetConfig from_config(const util::KvConfig& kv);
};

class ConvGluUnet final : public Backbone {
 public:
  explicit ConvGluUnet(const ConvGluUnetConfig& cfg);
  ~ConvGluUnet() override;

  std::string kind() const override { return "convglu_unet"; }
  int bins() const override { return cfg_.bins; }
  nn::Var forward_train(nn::Tape& tape, const nn::Tensor& xt, const nn::Tensor& cond,
                        double t) override;
  nn::Tensor forward(const nn::Tensor& xt, const nn::Tensor& cond, double t) const override;
  std::unique_ptr<BackboneStream> open_stream(double t) const override;
  std::vector<nn::Parameter*> parameters() override;
  std::vector<LayerInfo> layer_infos() const override;
  util::KvConfig config() const override { return cfg_.to_config(); }

  const ConvGluUnetConfig& unet_config() const { return cfg_; }

  struct Impl;  // shared with the streaming context

 private:
  ConvGluUnetConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flowsr::models
