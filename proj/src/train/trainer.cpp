#include "flowsr/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <thread>
#include <filesystem>
#include <sstream>

#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::train {

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("train: steps must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(learning_rate >= 0.0)) throw ConfigError("train: learning_rate must be >= 0");
  if (checkpoint_interval < 1) throw ConfigError("train: checkpoint_interval must be >= 1");
  const double min_seconds = static_cast<double>(stft.window_len) / stft.sample_rate;
  if (segment_seconds < min_seconds) {
    throw ConfigError("train: segment_seconds must cover at least one analysis window");
  }
  stft.validate();
  compression.validate();
  flow.validate();
}

util::KvConfig TrainConfig::to_config() const {
  util::KvConfig kv;
  kv.set("train.steps", steps);
  kv.set("train.batch_size", static_cast<int64_t>(batch_size));
  kv.set("train.learning_rate", learning_rate);
  kv.set("train.beta1", beta1);
  kv.set("train.beta2", beta2);
  kv.set("train.adam_eps", adam_eps);
  kv.set("train.segment_seconds", segment_seconds);
  kv.set("train.seed", static_cast<int64_t>(seed));
  kv.set("train.checkpoint_interval", checkpoint_interval);
  kv.set("train.backbone", backbone);
  kv.set("train.out_dir", out_dir);
  kv.set("train.speech_wav_dir", speech_wav_dir);
  kv.set("train.noise_wav_dir", noise_wav_dir);
  kv.set("train.target_dbfs", target_dbfs);
  kv.set("train.grad_workers", static_cast<int64_t>(grad_workers));
  fm::encode_stft(kv, stft);
  fm::encode_compression(kv, compression);
  fm::encode_flow(kv, flow);
  std::string kinds;
  for (size_t i = 0; i < chains.kinds.size(); ++i) {
    if (i) kinds += ",";
    kinds += degrade::to_string(chains.kinds[i]);
  }
  kv.set("chains.kinds", kinds);
  kv.set("chains.min_ops", static_cast<int64_t>(chains.min_ops));
  kv.set("chains.max_ops", static_cast<int64_t>(chains.max_ops));
  kv.set("chains.snr_db_lo", chains.snr_db_lo);
  kv.set("chains.snr_db_hi", chains.snr_db_hi);
  return kv;
}

TrainConfig TrainConfig::from_config(const util::KvConfig& kv) {
  TrainConfig cfg;
  cfg.steps = kv.get_int_or("train.steps", cfg.steps);
  cfg.batch_size = static_cast<int>(kv.get_int_or("train.batch_size", cfg.batch_size));
  cfg.learning_rate = kv.get_double_or("train.learning_rate", cfg.learning_rate);
  cfg.beta1 = kv.get_double_or("train.beta1", cfg.beta1);
  cfg.beta2 = kv.get_double_or("train.beta2", cfg.beta2);
  cfg.adam_eps = kv.get_double_or("train.adam_eps", cfg.adam_eps);
  cfg.segment_seconds = kv.get_double_or("train.segment_seconds", cfg.segment_seconds);
  cfg.seed = static_cast<uint64_t>(kv.get_int_or("train.seed", 0));
  cfg.checkpoint_interval = kv.get_int_or("train.checkpoint_interval", cfg.checkpoint_interval);
  cfg.backbone = kv.get_string_or("train.backbone", cfg.backbone);
  cfg.out_dir = kv.get_string_or("train.out_dir", cfg.out_dir);
  cfg.speech_wav_dir = kv.get_string_or("train.speech_wav_dir", "");
  cfg.noise_wav_dir = kv.get_string_or("train.noise_wav_dir", "");
  cfg.target_dbfs = kv.get_double_or("train.target_dbfs", cfg.target_dbfs);
  cfg.grad_workers = static_cast<int>(kv.get_int_or("train.grad_workers", cfg.grad_workers));
  cfg.stft = fm::decode_stft(kv);
  cfg.compression = fm::decode_compression(kv);
  cfg.flow = fm::decode_flow(kv);
  if (kv.has("chains.kinds")) {
    cfg.chains.kinds.clear();
    for (const auto& name : util::split(kv.get_string("chains.kinds"), ',')) {
      if (!name.empty()) cfg.chains.kinds.push_back(degrade::kind_from_string(name));
    }
  }
  cfg.chains.min_ops = static_cast<int>(kv.get_int_or("chains.min_ops", cfg.chains.min_ops));
  cfg.chains.max_ops = static_cast<int>(kv.get_int_or("chains.max_ops", cfg.chains.max_ops));
  cfg.chains.snr_db_lo = kv.get_double_or("chains.snr_db_lo", cfg.chains.snr_db_lo);
  cfg.chains.snr_db_hi = kv.get_double_or("chains.snr_db_hi", cfg.chains.snr_db_hi);
  return cfg;
}

TrainingPair sample_training_pair(SpeechSource& speech, degrade::NoiseSource& noise,
                                  const TrainConfig& cfg, uint64_t pair_seed) {
  const dsp::Stft stft(cfg.stft);
  for (int attempt = 0; attempt < 5; ++attempt) {
    const uint64_t s = util::mix_seed(pair_seed, static_cast<uint64_t>(attempt));
    auto clean = speech.draw(cfg.segment_seconds, cfg.stft.sample_rate,
                             util::mix_seed(s, 0x636c6eULL));
    if (dsp::rms(clean.samples) <= 0.0) continue;  // silent draw, resample

    auto [clean_norm, gain] = dsp::rms_normalize(clean, cfg.target_dbfs);
    auto chain = degrade::sample_chain(cfg.chains, util::mix_seed(s, 0x6368ULL));
    auto composed = degrade::compose_chain(clean_norm, chain, noise, cfg.stft);

    TrainingPair pair;
    pair.x1 = models::pack_spectrogram(
        dsp::compress(stft.analyze(clean_norm), cfg.compression));
    pair.cond = models::pack_spectrogram(
        dsp::compress(stft.analyze(composed.noisy), cfg.compression));
    pair.provenance = std::move(composed.provenance);
    pair.clean_rms_dbfs = 20.0 * std::log10(dsp::rms(clean_norm.samples));
    return pair;
  }
  throw DataError("speech source produced only silent clips");
}

Trainer::Trainer(const TrainConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  model_ = models::build_preset(cfg_.backbone, cfg_.stft.bins(),
                                util::mix_seed(cfg_.seed, 0x696e6974ULL));
  params_ = model_->parameters();
  if (cfg_.speech_wav_dir.empty()) {
    speech_ = std::make_unique<PseudoSpeechSource>();
  } else {
    speech_ = std::make_unique<WavDirSpeechSource>(cfg_.speech_wav_dir);
  }
  if (cfg_.noise_wav_dir.empty()) {
    noise_ = std::make_unique<degrade::ColoredNoiseSource>("any");
  } else {
    noise_ = std::make_unique<degrade::WavDirNoiseSource>(cfg_.noise_wav_dir);
  }
  optim_ = Adam(params_, AdamConfig{cfg_.learning_rate, cfg_.beta1, cfg_.beta2, cfg_.adam_eps});
}

TrainingPair Trainer::make_pair(uint64_t pair_seed) const {
  return sample_training_pair(*speech_, *noise_, cfg_, pair_seed);
}

StepLog Trainer::run_single_step(int64_t step_index) {
  const auto t_start = std::chrono::steady_clock::now();
  for (auto* p : params_) p->zero_grad();

  // Items are independent draws keyed by (seed, global index); workers
  // compute per-item gradients on private tapes, and the merge below runs in
  // item order, so any worker count reproduces the sequential result
  // bit-exactly.
  struct ItemResult {
    double loss = 0.0;
    double t = 0.0;
    std::vector<std::pair<nn::Parameter*, nn::Tensor>> grads;
  };
  std::vector<ItemResult> results(cfg_.batch_size);
  auto run_item = [&](int item) {
    const uint64_t idx =
        static_cast<uint64_t>(step_index) * static_cast<uint64_t>(cfg_.batch_size) +
        static_cast<uint64_t>(item);
    const auto pair = make_pair(util::mix_seed(cfg_.seed, idx, 0x64617461ULL));

    util::Rng flow_rng(util::mix_seed(cfg_.seed, idx, 0x666c6f77ULL));
    const double t = flow_rng.uniform();
    const double sigma_t = (1.0 - t) * cfg_.flow.sigma_max + t * cfg_.flow.sigma_min;
    const double du_dz = cfg_.flow.sigma_min - cfg_.flow.sigma_max;

    nn::Tensor xt(pair.x1.shape());
    nn::Tensor target(pair.x1.shape());
    for (int64_t i = 0; i < xt.size(); ++i) {
      const double z = flow_rng.gaussian();
      xt[i] = t * pair.x1[i] + sigma_t * z;
      target[i] = pair.x1[i] + du_dz * z;
    }

    nn::Tape tape;
    nn::Var v = model_->forward_train(tape, xt, pair.cond, t);
    nn::Var loss = tape.mse(v, std::move(target));
    results[item].loss = tape.val(loss)[0];
    results[item].t = t;
    results[item].grads = tape.backward_take_param_grads(loss);
  };

  const int workers = std::max(1, std::min(cfg_.grad_workers, cfg_.batch_size));
  if (workers == 1) {
    for (int item = 0; item < cfg_.batch_size; ++item) run_item(item);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int item = w; item < cfg_.batch_size; item += workers) run_item(item);
      });
    }
    for (auto& th : pool) th.join();
  }

  double loss_sum = 0.0;
  std::ostringstream t_drawn;
  for (int item = 0; item < cfg_.batch_size; ++item) {
    loss_sum += results[item].loss;
    t_drawn << (item ? "," : "") << results[item].t;
    for (auto& [param, grad] : results[item].grads) {
      nn::Tensor& pg = param->grad;
      for (int64_t i = 0; i < pg.size(); ++i) pg[i] += grad[i];
    }
  }

  const double inv_batch = 1.0 / cfg_.batch_size;
  double grad_sq = 0.0;
  for (auto* p : params_) {
    for (int64_t i = 0; i < p->grad.size(); ++i) {
      p->grad[i] *= inv_batch;
      grad_sq += p->grad[i] * p->grad[i];
    }
  }
  const double loss = loss_sum * inv_batch;
  if (!std::isfinite(loss) || !std::isfinite(grad_sq)) {
    throw NumericError("training diverged at step " + std::to_string(step_index) +
                       ": loss=" + std::to_string(loss) + " grad_norm^2=" +
                       std::to_string(grad_sq) + " t_values=[" + t_drawn.str() + "]");
  }
  optim_.step(params_);
  step_ = step_index + 1;

  StepLog log;
  log.step = step_index;
  log.loss = loss;
  log.grad_norm = std::sqrt(grad_sq);
  log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return log;
}

void Trainer::run(const std::function<void(const StepLog&)>& on_step,
                  const std::string& checkpoint_path) {
  while (step_ < cfg_.steps) {
    const StepLog log = run_single_step(step_);
    if (on_step) on_step(log);
    const bool at_interval = (step_ % cfg_.checkpoint_interval) == 0;
    if (!checkpoint_path.empty() && (at_interval || step_ == cfg_.steps)) {
      save(checkpoint_path);
    }
  }
}

void Trainer::save(const std::string& path) const {
  nn::CheckpointData data;
  data.seed = cfg_.seed;
  data.config = cfg_.to_config();
  const util::KvConfig model_config = model_->config();
  for (const auto& [k, v] : model_config.entries()) data.config.set(k, v);
  auto params = const_cast<Trainer*>(this)->model_->parameters();
  for (const auto* p : params) data.params.emplace_back(p->name, p->value);
  data.has_optimizer = true;
  data.optimizer_step = static_cast<uint64_t>(optim_.step_count());
  data.optimizer_m = optim_.moments_m();
  data.optimizer_v = optim_.moments_v();
  nn::save_checkpoint(path, data);
}

void Trainer::resume_from(const std::string& checkpoint_path) {
  const auto data = nn::load_checkpoint(checkpoint_path);
  if (data.params.size() != params_.size()) {
    throw DataError("checkpoint parameter count does not match the configured model");
  }
  if (!data.has_optimizer) {
    throw DataError("checkpoint has no optimizer state; cannot resume training");
  }
  // Validate the whole table before touching any state.
  for (size_t i = 0; i < params_.size(); ++i) {
    if (data.params[i].first != params_[i]->name ||
        !(data.params[i].second.shape() == params_[i]->value.shape())) {
      throw DataError("checkpoint parameter mismatch at '" + data.params[i].first + "'");
    }
  }
  for (size_t i = 0; i < params_.size(); ++i) params_[i]->value = data.params[i].second;
  optim_.restore(static_cast<int64_t>(data.optimizer_step), data.optimizer_m,
                 data.optimizer_v);
  step_ = static_cast<int64_t>(data.optimizer_step);
}

std::unique_ptr<models::Backbone> backbone_from_checkpoint(const nn::CheckpointData& data) {
  auto model = models::build_from_config(data.config);
  auto params = model->parameters();
  if (params.size() != data.params.size()) {
    throw DataError("checkpoint parameter count does not match its model config");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (data.params[i].first != params[i]->name ||
        !(data.params[i].second.shape() == params[i]->value.shape())) {
      throw DataError("checkpoint parameter mismatch at '" + data.params[i].first + "'");
    }
  }
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = data.params[i].second;
  return model;
}

}  // namespace flowsr::train
