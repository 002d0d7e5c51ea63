#include "flowsr/stream/stream_engine.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "flowsr/fm/flow_path.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::stream {

std::string LatencyReport::to_string() const {
  std::ostringstream os;
  os << "algorithmic_latency_ms: " << algorithmic_latency_ms << "\n";
  os << "window_ms: " << window_ms << "\n";
  os << "hop_ms: " << hop_ms << "\n";
  os << "compute_per_frame_ms: " << compute_per_frame_ms << "\n";
  os << "real_time_factor: " << real_time_factor << "\n";
  os << "nfe: " << nfe << "\n";
  return os.str();
}

StreamSession::StreamSession(const models::Backbone& model, const StreamConfig& cfg)
    : cfg_(cfg), stft_(cfg.stft) {
  cfg_.sampler.validate();
  cfg_.flow.validate();
  cfg_.compression.validate();
  if (!model.causal_verified()) {
    throw ConfigError("stream refused: model does not certify causal operation");
  }
  if (model.bins() != cfg_.stft.bins()) {
    throw ConfigError("stream: model expects " + std::to_string(model.bins()) +
                      " bins but the stft config yields " + std::to_string(cfg_.stft.bins()));
  }
  bins_ = cfg_.stft.bins();
  eval_times_ = cfg_.sampler.evaluation_times();
  for (double t : eval_times_) contexts_.push_back(model.open_stream(t));

  window_buf_.assign(cfg_.stft.window_len, 0.0);
  ola_acc_.assign(cfg_.stft.window_len, 0.0);
  ola_norm_.assign(cfg_.stft.window_len, 0.0);
  frame_scratch_.assign(cfg_.stft.window_len, 0.0);
  bins_scratch_.assign(bins_, 0.0);
  x_col_.assign(2 * bins_, 0.0);
  xm_col_.assign(2 * bins_, 0.0);
  cond_col_.assign(2 * bins_, 0.0);
  v_col_.assign(2 * bins_, 0.0);
}

StreamSession::~StreamSession() = default;

void StreamSession::process_frame(std::vector<double>& out) {
  // conditioning column: compressed spectrum of the current window
  stft_.analyze_frame(window_buf_.data(), bins_scratch_.data());
  for (int f = 0; f < bins_; ++f) {
    bins_scratch_[f] = dsp::compress_bin(bins_scratch_[f], cfg_.compression);
  }
  models::pack_column(bins_scratch_.data(), bins_, cond_col_.data());

  // seeded base draw for this frame index
  fm::draw_noise_column(bins_, cfg_.seed, frame_index_, bins_scratch_.data());
  for (int f = 0; f < bins_; ++f) bins_scratch_[f] *= cfg_.flow.sigma_max;
  models::pack_column(bins_scratch_.data(), bins_, x_col_.data());

  const double h = cfg_.sampler.step_size();
  const int two_f = 2 * bins_;
  if (cfg_.sampler.scheme == fm::OdeScheme::kEuler) {
    for (size_t k = 0; k < contexts_.size(); ++k) {
      contexts_[k]->step(x_col_.data(), cond_col_.data(), v_col_.data());
      for (int c = 0; c < two_f; ++c) x_col_[c] += h * v_col_[c];
    }
  } else {
    for (size_t j = 0; 2 * j + 1 < contexts_.size(); ++j) {
      contexts_[2 * j]->step(x_col_.data(), cond_col_.data(), v_col_.data());
      for (int c = 0; c < two_f; ++c) xm_col_[c] = x_col_[c] + 0.5 * h * v_col_[c];
      contexts_[2 * j + 1]->step(xm_col_.data(), cond_col_.data(), v_col_.data());
      for (int c = 0; c < two_f; ++c) x_col_[c] += h * v_col_[c];
    }
  }

  models::unpack_column(x_col_.data(), bins_, bins_scratch_.data());
  for (int f = 0; f < bins_; ++f) {
    bins_scratch_[f] = dsp::decompress_bin(bins_scratch_[f], cfg_.compression);
  }
  stft_.synthesize_frame(bins_scratch_.data(), frame_scratch_.data());

  const auto& window = stft_.window();
  for (int n = 0; n < cfg_.stft.window_len; ++n) {
    ola_acc_[n] += frame_scratch_[n];
    ola_norm_[n] += window[n] * window[n];
  }
  frame_index_ += 1;

  // samples in the leading hop are final now
  const int hop = cfg_.stft.hop_len;
  for (int n = 0; n < hop; ++n) {
    out.push_back(ola_norm_[n] > 1e-10 ? ola_acc_[n] / ola_norm_[n] : 0.0);
  }
  total_out_ += hop;
  std::copy(ola_acc_.begin() + hop, ola_acc_.end(), ola_acc_.begin());
  std::fill(ola_acc_.end() - hop, ola_acc_.end(), 0.0);
  std::copy(ola_norm_.begin() + hop, ola_norm_.end(), ola_norm_.begin());
  std::fill(ola_norm_.end() - hop, ola_norm_.end(), 0.0);
  std::copy(window_buf_.begin() + hop, window_buf_.end(), window_buf_.begin());
  fill_ = cfg_.stft.window_len - hop;
}

std::vector<double> StreamSession::push(const double* samples, size_t count) {
  if (closed_) throw DataError("push after flush on a closed stream");
  std::vector<double> out;
  for (size_t i = 0; i < count; ++i) {
    window_buf_[fill_++] = cfg_.input_gain * samples[i];
    total_in_ += 1;
    if (fill_ == cfg_.stft.window_len) process_frame(out);
  }
  return out;
}

std::vector<double> StreamSession::push(const std::vector<double>& samples) {
  return push(samples.data(), samples.size());
}

std::vector<double> StreamSession::flush() {
  if (closed_) throw DataError("flush called twice on a closed stream");
  if (total_in_ < cfg_.stft.window_len) {
    throw DataError("insufficient input: stream saw fewer samples than one analysis window");
  }
  std::vector<double> out;
  // cover any samples past the last full frame with one zero-padded frame
  const int64_t covered =
      cfg_.stft.window_len + (frame_index_ - 1) * static_cast<int64_t>(cfg_.stft.hop_len);
  if (total_in_ > covered) {
    std::fill(window_buf_.begin() + fill_, window_buf_.end(), 0.0);
    process_frame(out);
  }
  const int64_t tail = std::max<int64_t>(
      0, std::min<int64_t>(cfg_.stft.window_len - cfg_.stft.hop_len, total_in_ - total_out_));
  for (int64_t n = 0; n < tail; ++n) {
    out.push_back(ola_norm_[n] > 1e-10 ? ola_acc_[n] / ola_norm_[n] : 0.0);
  }
  total_out_ += tail;
  closed_ = true;
  return out;
}

LatencyReport measure_latency(const models::Backbone& model, const StreamConfig& cfg,
                              double benchmark_seconds) {
  LatencyReport report;
  report.algorithmic_latency_ms = cfg.stft.algorithmic_latency_seconds() * 1000.0;
  report.window_ms = 1000.0 * cfg.stft.window_len / cfg.stft.sample_rate;
  report.hop_ms = 1000.0 * cfg.stft.hop_len / cfg.stft.sample_rate;
  report.nfe = cfg.sampler.nfe;

  const size_t n = static_cast<size_t>(benchmark_seconds * cfg.stft.sample_rate);
  util::Rng rng(cfg.seed, 0x62656e6368ULL);
  std::vector<double> signal(n);
  for (auto& v : signal) v = 0.05 * rng.gaussian();

  StreamSession session(model, cfg);
  const auto t0 = std::chrono::steady_clock::now();
  session.push(signal);
  session.flush();
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int64_t frames = session.frames_processed();
  report.compute_per_frame_ms = frames > 0 ? 1000.0 * elapsed / frames : 0.0;
  report.real_time_factor = report.compute_per_frame_ms / report.hop_ms;
  return report;
}

}  // namespace flowsr::stream
