#pragma once

#include <cstdint>

#include "flowsr/dsp/stft.hpp"
#include "flowsr/fm/sampler.hpp"

namespace flowsr::fm {

struct RestoreOptions {
  dsp::StftConfig stft;
  dsp::CompressionParams compression;
  FlowPathParams flow;
  SamplerConfig sampler;
  uint64_t seed = 0;
  bool normalize_input = true;  // streaming callers pre-apply their own gain
  double target_dbfs = -25.0;
};

// Offline enhancement: normalize -> stft -> compress -> integrate the learned
// field from a seeded base draw conditioned on the degraded spectrogram ->
// decompress -> istft. Output has exactly the input's length; the tail frame
// is zero-padded before analysis and trimmed after synthesis. The result is a
// pure function of (input, field, options).
dsp::AudioBuffer restore(const dsp::AudioBuffer& noisy, const VelocityFieldFn& velocity,
                         const RestoreOptions& options, int64_t* eval_count = nullptr);

}  // namespace flowsr::fm
