#include "flowsr/fm/restore.hpp"

#include "flowsr/util/error.hpp"

namespace flowsr::fm {

dsp::AudioBuffer restore(const dsp::AudioBuffer& noisy, const VelocityFieldFn& velocity,
                         const RestoreOptions& options, int64_t* eval_count) {
  options.sampler.validate();
  options.flow.validate();
  const dsp::Stft stft(options.stft);

  dsp::AudioBuffer input = noisy;
  if (options.normalize_input) {
    input = dsp::rms_normalize(noisy, options.target_dbfs).first;
  }
  const size_t original_len = input.samples.size();
  if (original_len < static_cast<size_t>(options.stft.window_len)) {
    throw DataError("insufficient input: need at least one window of audio");
  }

  // Zero-pad so the frame grid covers every input sample.
  const int frames = options.stft.frames_covering(original_len);
  const size_t padded_len = static_cast<size_t>(frames - 1) * options.stft.hop_len +
                            options.stft.window_len;
  input.samples.resize(padded_len, 0.0);

  const auto cond = dsp::compress(stft.analyze(input), options.compression);

  dsp::ComplexSpectrogram x0 = draw_base_noise(cond.bins, cond.frames, options.seed);
  for (auto& c : x0.data) c *= options.flow.sigma_max;

  const auto x1 = integrate_ode(velocity, std::move(x0), cond, options.sampler, eval_count);

  auto out = stft.synthesize(dsp::decompress(x1, options.compression));
  out.samples.resize(original_len);
  return out;
}

}  // namespace flowsr::fm
