#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "flowsr/dsp/audio_buffer.hpp"

namespace flowsr::degrade {

// Unit-RMS colored noise; kind is one of white, pink, brown.
dsp::AudioBuffer colored_noise(const std::string& kind, size_t len, int sample_rate,
                               uint64_t seed);

// Supplies noise segments for additive mixing. draw() must be deterministic
// in (len, seed) and record everything needed for bit-exact regeneration in
// the descriptor.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual dsp::AudioBuffer draw(size_t len, int sample_rate, uint64_t seed,
                                nlohmann::json* descriptor) = 0;
};

// kind "any" picks white/pink/brown per draw.
class ColoredNoiseSource final : public NoiseSource {
 public:
  explicit ColoredNoiseSource(std::string kind = "any") : kind_(std::move(kind)) {}
  dsp::AudioBuffer draw(size_t len, int sample_rate, uint64_t seed,
                        nlohmann::json* descriptor) override;

 private:
  std::string kind_;
};

// Draws a random file (and random offset, looped) from a directory of WAVs
// at the working sample rate.
class WavDirNoiseSource final : public NoiseSource {
 public:
  explicit WavDirNoiseSource(const std::string& dir);
  dsp::AudioBuffer draw(size_t len, int sample_rate, uint64_t seed,
                        nlohmann::json* descriptor) override;
  size_t file_count() const { return files_.size(); }

 private:
  std::vector<std::string> files_;
};

// Re-creates the exact noise segment a descriptor records.
dsp::AudioBuffer noise_from_descriptor(const nlohmann::json& descriptor, size_t len,
                                       int sample_rate);

}  // namespace flowsr::degrade
