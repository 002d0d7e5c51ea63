#pragma once

#include <cstdint>
#include <vector>

#include "flowsr/degrade/biquad.hpp"
#include "flowsr/dsp/audio_buffer.hpp"

namespace flowsr::degrade {

// Mix noise at an exact SNR (clean power over scaled-noise power). The noise
// is looped or cropped to the clean length first, so the ratio is computed on
// the segment actually added. +inf passes the clean signal through untouched.
// Returns the applied noise gain through *gain_out when non-null.
dsp::AudioBuffer apply_noise(const dsp::AudioBuffer& clean, const dsp::AudioBuffer& noise,
                             double snr_db, double* gain_out = nullptr);

// Synthetic room response: unit direct tap (scaled by direct_ratio) followed
// by white-noise taps under an exp(-6.908 t / T60) envelope, i.e. -60 dB at
// t = T60.
std::vector<double> make_rir(double t60_s, int sample_rate, uint64_t seed,
                             double direct_ratio = 1.0);
dsp::AudioBuffer apply_reverb(const dsp::AudioBuffer& clean, double t60_s, uint64_t seed,
                              double direct_ratio = 1.0);

dsp::AudioBuffer apply_bandlimit(const dsp::AudioBuffer& clean, double cutoff_hz, int order,
                                 FilterType type);

// hard: clamp to +-threshold; soft: threshold * tanh(x / threshold).
dsp::AudioBuffer apply_clip(const dsp::AudioBuffer& clean, double threshold, bool hard);

// Stand-in for lossy codecs: mu-law companded quantization at bit_depth plus
// decimate-then-hold. bit_depth in [4, 16], decimation in {1, 2, 4}.
dsp::AudioBuffer apply_codec_proxy(const dsp::AudioBuffer& clean, int bit_depth,
                                   int decimation);

struct MaskRect {
  int f0 = 0, l0 = 0, fw = 0, lw = 0;
};

// Zeroes exactly patch_count axis-aligned rectangles (possibly overlapping);
// every other bin is untouched. The realized rectangles are returned for
// replay.
dsp::ComplexSpectrogram apply_tf_mask(const dsp::ComplexSpectrogram& spec, int patch_count,
                                      int max_f, int max_l, uint64_t seed,
                                      std::vector<MaskRect>* rects_out = nullptr);
dsp::ComplexSpectrogram apply_mask_rects(const dsp::ComplexSpectrogram& spec,
                                         const std::vector<MaskRect>& rects);

dsp::AudioBuffer apply_level_shift(const dsp::AudioBuffer& clean, double gain_db);

// FFT convolution, output trimmed to the first signal's length.
std::vector<double> convolve_trimmed(const std::vector<double>& x,
                                     const std::vector<double>& h);

}  // namespace flowsr::degrade
