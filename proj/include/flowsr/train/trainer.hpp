#pragma once

#include <functional>
#include <memory>
#include <string>

#include "flowsr/degrade/chain.hpp"
#include "flowsr/fm/config_codec.hpp"
#include "flowsr/models/presets.hpp"
#include "flowsr/nn/checkpoint.hpp"
#include "flowsr/train/adam.hpp"
#include "flowsr/train/pseudo_speech.hpp"

namespace flowsr::train {

struct TrainConfig {
  int64_t steps = 5000;
  int batch_size = 8;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double segment_seconds = 2.0;
  uint64_t seed = 0;
  int64_t checkpoint_interval = 1000;
  std::string backbone = "convglu-toy";
  std::string out_dir = ".";
  std::string speech_wav_dir;  // empty: built-in pseudo-speech
  std::string noise_wav_dir;   // empty: built-in colored noise
  double target_dbfs = -25.0;
  int grad_workers = 2;  // per-item tapes; result is identical for any count
  dsp::StftConfig stft;
  dsp::CompressionParams compression;
  fm::FlowPathParams flow;
  degrade::ChainSamplerConfig chains;

  void validate() const;
  util::KvConfig to_config() const;
  static TrainConfig from_config(const util::KvConfig& kv);
};

struct TrainingPair {
  nn::Tensor x1;    // [2F, L] compressed clean
  nn::Tensor cond;  // [2F, L] compressed degraded
  nlohmann::json provenance;
  double clean_rms_dbfs = 0.0;
};

TrainingPair sample_training_pair(SpeechSource& speech, degrade::NoiseSource& noise,
                                  const TrainConfig& cfg, uint64_t pair_seed);

struct StepLog {
  int64_t step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double wall_time_s = 0.0;
};

// Owns the model, data sources and optimizer state; every random draw is a
// pure function of (seed, global sample index), so runs reproduce bit-exactly
// and a resumed run continues the exact sample stream.
class Trainer {
 public:
  explicit Trainer(const TrainConfig& cfg);

  StepLog run_single_step(int64_t step_index);
  // Runs the remaining steps; per-step callback for logging, checkpoints at
  // the configured interval plus one at the end (skipped when path empty).
  void run(const std::function<void(const StepLog&)>& on_step = {},
           const std::string& checkpoint_path = {});

  void save(const std::string& path) const;
  void resume_from(const std::string& checkpoint_path);

  models::Backbone& model() { return *model_; }
  int64_t completed_steps() const { return step_; }
  const TrainConfig& config() const { return cfg_; }
  TrainingPair make_pair(uint64_t pair_seed) const;

 private:
  TrainConfig cfg_;
  std::unique_ptr<models::Backbone> model_;
  std::vector<nn::Parameter*> params_;
  std::unique_ptr<SpeechSource> speech_;
  std::unique_ptr<degrade::NoiseSource> noise_;
  Adam optim_;
  int64_t step_ = 0;
};

// Rebuilds a backbone (with weights) from a checkpoint.
std::unique_ptr<models::Backbone> backbone_from_checkpoint(const nn::CheckpointData& data);

}  // namespace flowsr::train
