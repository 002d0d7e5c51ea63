#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "flowsr/dsp/audio_buffer.hpp"

namespace flowsr::train {

// Harmonic pseudo-speech: syllable-rate bursts of a pitch-drifting harmonic
// stack shaped by randomized formant resonances, with silences and a little
// breath noise. Enough structure for restoration experiments without any
// external corpus; fully determined by the seed.
dsp::AudioBuffer pseudo_speech(double seconds, int sample_rate, uint64_t seed);

class SpeechSource {
 public:
  virtual ~SpeechSource() = default;
  virtual dsp::AudioBuffer draw(double seconds, int sample_rate, uint64_t seed) = 0;
};

class PseudoSpeechSource final : public SpeechSource {
 public:
  dsp::AudioBuffer draw(double seconds, int sample_rate, uint64_t seed) override {
    return pseudo_speech(seconds, sample_rate, seed);
  }
};

// Random file + random crop from a directory of clean WAVs (looped when the
// file is shorter than the requested segment).
class WavDirSpeechSource final : public SpeechSource {
 public:
  explicit WavDirSpeechSource(const std::string& dir);
  dsp::AudioBuffer draw(double seconds, int sample_rate, uint64_t seed) override;

 private:
  std::vector<std::string> files_;
};

}  // namespace flowsr::train
