#pragma once

#include <string>
#include <vector>

#include "flowsr/dsp/stft.hpp"
#include "flowsr/models/backbone.hpp"

namespace flowsr::models {

struct ComplexityReport {
  int64_t params = 0;
  double macs_per_second = 0.0;  // multiply-accumulates per second of audio
  double receptive_field_seconds = 0.0;
  int64_t receptive_field_frames = 0;

  std::string to_string() const;
};

// params are counted exactly; MACs/s is per-frame MACs times the frame rate;
// the receptive field chains (kernel_t - 1) * dilation_t over layers on the
// serial path: rf = (1 + sum) * hop / sample_rate. Works on any declared
// layer list, not only on instantiated networks.
ComplexityReport count_complexity(const std::vector<LayerInfo>& layers,
                                  const dsp::StftConfig& stft);

}  // namespace flowsr::models
