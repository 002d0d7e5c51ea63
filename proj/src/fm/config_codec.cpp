#include "flowsr/fm/config_codec.hpp"

namespace flowsr::fm {

void encode_stft(util::KvConfig& kv, const dsp::StftConfig& cfg) {
  kv.set("stft.sample_rate", static_cast<int64_t>(cfg.sample_rate));
  kv.set("stft.window_len", static_cast<int64_t>(cfg.window_len));
  kv.set("stft.hop_len", static_cast<int64_t>(cfg.hop_len));
  kv.set("stft.fft_len", static_cast<int64_t>(cfg.fft_len));
  kv.set("stft.window", dsp::to_string(cfg.window));
}

dsp::StftConfig decode_stft(const util::KvConfig& kv) {
  dsp::StftConfig cfg;
  cfg.sample_rate = static_cast<int>(kv.get_int_or("stft.sample_rate", cfg.sample_rate));
  cfg.window_len = static_cast<int>(kv.get_int_or("stft.window_len", cfg.window_len));
  cfg.hop_len = static_cast<int>(kv.get_int_or("stft.hop_len", cfg.hop_len));
  cfg.fft_len = static_cast<int>(kv.get_int_or("stft.fft_len", cfg.fft_len));
  cfg.window = dsp::window_kind_from_string(
      kv.get_string_or("stft.window", dsp::to_string(cfg.window)));
  return cfg;
}

void encode_compression(util::KvConfig& kv, const dsp::CompressionParams& params) {
  kv.set("compress.alpha", params.alpha);
  kv.set("compress.beta", params.beta);
}

dsp::CompressionParams decode_compression(const util::KvConfig& kv) {
  dsp::CompressionParams params;
  params.alpha = kv.get_double_or("compress.alpha", params.alpha);
  params.beta = kv.get_double_or("compress.beta", params.beta);
  return params;
}

void encode_flow(util::KvConfig& kv, const FlowPathParams& params) {
  kv.set("flow.sigma_min", params.sigma_min);
  kv.set("flow.sigma_max", params.sigma_max);
}

FlowPathParams decode_flow(const util::KvConfig& kv) {
  FlowPathParams params;
  params.sigma_min = kv.get_double_or("flow.sigma_min", params.sigma_min);
  params.sigma_max = kv.get_double_or("flow.sigma_max", params.sigma_max);
  return params;
}

void encode_sampler(util::KvConfig& kv, const SamplerConfig& cfg) {
  kv.set("sampler.nfe", static_cast<int64_t>(cfg.nfe));
  kv.set("sampler.scheme", to_string(cfg.scheme));
}

SamplerConfig decode_sampler(const util::KvConfig& kv) {
  SamplerConfig cfg;
  cfg.nfe = static_cast<int>(kv.get_int_or("sampler.nfe", cfg.nfe));
  cfg.scheme = scheme_from_string(kv.get_string_or("sampler.scheme", to_string(cfg.scheme)));
  return cfg;
}

}  // namespace flowsr::fm
