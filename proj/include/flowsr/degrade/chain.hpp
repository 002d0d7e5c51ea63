#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flowsr/degrade/degradations.hpp"
#include "flowsr/degrade/noise_source.hpp"
#include "flowsr/dsp/stft.hpp"

namespace flowsr::degrade {

enum class DegradationKind {
  kAdditiveNoise,
  kReverb,
  kBandlimit,
  kClip,
  kCodecProxy,
  kTfMask,
  kLevelShift,
};

DegradationKind kind_from_string(const std::string& name);
std::string to_string(DegradationKind kind);

// One parameterized operator. Fields outside the active kind are ignored.
struct DegradationSpec {
  DegradationKind kind = DegradationKind::kAdditiveNoise;

  double snr_db = 10.0;             // additive_noise; +inf passes through
  std::string noise_kind = "any";   // additive_noise: white|pink|brown|any

  double t60_s = 0.3;               // reverb
  double direct_ratio = 1.0;

  double cutoff_hz = 4000.0;        // bandlimit
  int order = 8;
  FilterType filter_type = FilterType::kLowpass;

  double threshold = 0.1;           // clip
  bool hard = true;

  int bit_depth = 8;                // codec_proxy
  int decimation = 1;

  int patch_count = 2;              // tf_mask
  int max_f = 24;
  int max_l = 16;

  double gain_db = 0.0;             // level_shift

  void validate() const;
  nlohmann::json to_json() const;
  static DegradationSpec from_json(const nlohmann::json& j);
};

struct DegradationChain {
  std::vector<DegradationSpec> ops;
  uint64_t rng_seed = 0;

  nlohmann::json to_json() const;
  static DegradationChain from_json(const nlohmann::json& j);
  static DegradationChain load(const std::string& path);
  void save(const std::string& path) const;
};

struct ComposeResult {
  dsp::AudioBuffer noisy;
  nlohmann::json provenance;  // realized parameters for exact replay
};

// Applies the operators in list order. Every random draw is derived from
// (chain.rng_seed, op index) and recorded in the provenance, so replaying
// the provenance on the same clean signal is bit-exact. Time-frequency masks
// run through the supplied analysis/synthesis config.
ComposeResult compose_chain(const dsp::AudioBuffer& clean, const DegradationChain& chain,
                            NoiseSource& noise_source,
                            const dsp::StftConfig& stft_cfg = dsp::StftConfig{});

dsp::AudioBuffer apply_provenance(const dsp::AudioBuffer& clean,
                                  const nlohmann::json& provenance,
                                  const dsp::StftConfig& stft_cfg = dsp::StftConfig{});

// Training-time chain randomization: 1..4 operators drawn without
// replacement from the enabled pool, parameters uniform in the documented
// ranges.
struct ChainSamplerConfig {
  std::vector<DegradationKind> kinds = {
      DegradationKind::kAdditiveNoise, DegradationKind::kReverb,
      DegradationKind::kBandlimit,     DegradationKind::kClip,
      DegradationKind::kCodecProxy,    DegradationKind::kTfMask,
      DegradationKind::kLevelShift,
  };
  int min_ops = 1;
  int max_ops = 4;
  double snr_db_lo = -5.0, snr_db_hi = 30.0;
  double t60_lo = 0.1, t60_hi = 0.9;
  double lowpass_lo = 1000.0, lowpass_hi = 7500.0;
  double highpass_lo = 50.0, highpass_hi = 400.0;
  double clip_lo = 0.02, clip_hi = 0.2;
  double level_lo = -20.0, level_hi = 6.0;
};

DegradationChain sample_chain(const ChainSamplerConfig& cfg, uint64_t seed);

}  // namespace flowsr::degrade
