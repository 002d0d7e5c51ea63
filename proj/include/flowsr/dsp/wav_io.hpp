#pragma once

#include <string>

#include "flowsr/dsp/audio_buffer.hpp"

namespace flowsr::dsp {

enum class WavSampleFormat { kPcm16, kFloat32 };

// Mono WAV only; 16-bit PCM and 32-bit float are accepted. No resampling
// anywhere in the pipeline: callers that need a specific rate must check it.
AudioBuffer read_wav(const std::string& path);

void write_wav(const std::string& path, const AudioBuffer& audio,
               WavSampleFormat format = WavSampleFormat::kFloat32);

// Spectrogram container: magic "CSPC", u32 version, u32 F, u32 L, then
// F*L interleaved (re, im) float32 pairs, frame-major, little-endian.
void write_spectrogram(const std::string& path, const ComplexSpectrogram& spec);
ComplexSpectrogram read_spectrogram(const std::string& path);

}  // namespace flowsr::dsp
