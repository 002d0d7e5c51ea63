#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowsr/degrade/chain.hpp"
#include "flowsr/train/pseudo_speech.hpp"

namespace flowsr::eval {

// Seeded synthetic evaluation clips: pseudo-speech at the target level,
// degraded either by random chains or by additive noise at one fixed SNR.
// Seeds are disjoint from training-pair seeds by construction.
struct TestsetConfig {
  int num_clips = 50;
  double clip_seconds = 2.0;
  uint64_t seed = 1;
  int sample_rate = 16000;
  double target_dbfs = -25.0;
  std::optional<double> fixed_snr_db;  // set: additive noise only at this SNR
  degrade::ChainSamplerConfig chains;
  dsp::StftConfig stft;  // analysis grid for tf_mask ops
};

struct TestClip {
  int index = 0;
  dsp::AudioBuffer clean;
  dsp::AudioBuffer noisy;
  nlohmann::json provenance;
  std::string degradation_tag;  // '+'-joined op kinds, chain order
};

std::vector<TestClip> make_toy_testset(const TestsetConfig& cfg);

// Writes clean_NNN.wav / noisy_NNN.wav / prov_NNN.json plus manifest.csv
// with header clean,noisy,provenance. Returns the manifest path.
std::string write_testset(const std::string& dir, const std::vector<TestClip>& clips);

struct ManifestEntry {
  std::string clean;
  std::string noisy;
  std::string provenance;  // optional, may be empty
  std::string enhanced;    // optional, may be empty
};

std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace flowsr::eval
