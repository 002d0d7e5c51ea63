#pragma once

#include <memory>
#include <vector>

#include "flowsr/fm/config_codec.hpp"
#include "flowsr/models/backbone.hpp"

namespace flowsr::stream {

struct StreamConfig {
  dsp::StftConfig stft;
  dsp::CompressionParams compression;
  fm::FlowPathParams flow;
  fm::SamplerConfig sampler;
  uint64_t seed = 0;
  // Streaming cannot see the whole signal, so whole-signal normalization is
  // the caller's job; this fixed gain is applied to incoming samples.
  double input_gain = 1.0;
};

struct LatencyReport {
  double algorithmic_latency_ms = 0.0;
  double window_ms = 0.0;
  double hop_ms = 0.0;
  double compute_per_frame_ms = 0.0;
  double real_time_factor = 0.0;
  int nfe = 0;

  std::string to_string() const;
};

// Frame-synchronous enhancement. One causal network context is pinned per
// sampler evaluation index; each completed input frame runs through all of
// them in sequence, so the per-frame reverse trajectory matches the offline
// integrator exactly while every context advances by one frame per frame.
// Base noise for frame n is a pure function of (seed, n).
class StreamSession {
 public:
  StreamSession(const models::Backbone& model, const StreamConfig& cfg);
  ~StreamSession();

  // Returns enhanced samples as they become final; hop_len of them per
  // completed analysis frame. Empty until the first full window arrives.
  std::vector<double> push(const double* samples, size_t count);
  std::vector<double> push(const std::vector<double>& samples);

  // Zero-pads any partial tail frame, emits the remaining overlap-add tail
  // (total output length equals total input length), and closes the stream.
  std::vector<double> flush();

  size_t cache_count() const { return contexts_.size(); }
  int64_t frames_processed() const { return frame_index_; }
  const StreamConfig& config() const { return cfg_; }

 private:
  void process_frame(std::vector<double>& out);

  StreamConfig cfg_;
  dsp::Stft stft_;
  std::vector<std::unique_ptr<models::BackboneStream>> contexts_;
  std::vector<double> eval_times_;
  int bins_ = 0;

  std::vector<double> window_buf_;  // accumulating analysis window
  int fill_ = 0;
  std::vector<double> ola_acc_, ola_norm_;
  std::vector<double> frame_scratch_;
  std::vector<std::complex<double>> bins_scratch_;
  std::vector<double> x_col_, xm_col_, cond_col_, v_col_;
  int64_t frame_index_ = 0;
  int64_t total_in_ = 0;
  int64_t total_out_ = 0;
  bool closed_ = false;
};

// Analytic latency plus measured compute on a seeded benchmark signal.
LatencyReport measure_latency(const models::Backbone& model, const StreamConfig& cfg,
                              double benchmark_seconds = 10.0);

}  // namespace flowsr::stream
