#include "flowsr/dsp/stft.hpp"

#include <algorithm>
#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::dsp {

WindowKind window_kind_from_string(const std::string& name) {
  if (name == "sqrt_hann") return WindowKind::kSqrtHann;
  if (name == "hann") return WindowKind::kHann;
  if (name == "rect") return WindowKind::kRect;
  throw ConfigError("unknown window kind: " + name);
}

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::kSqrtHann: return "sqrt_hann";
    case WindowKind::kHann: return "hann";
    case WindowKind::kRect: return "rect";
  }
  return "?";
}

std::vector<double> make_window(WindowKind kind, int len) {
  std::vector<double> w(len, 1.0);
  for (int n = 0; n < len; ++n) {
    const double hann = 0.5 * (1.0 - std::cos(2.0 * M_PI * n / len));  // periodic
    switch (kind) {
      case WindowKind::kSqrtHann: w[n] = std::sqrt(hann); break;
      case WindowKind::kHann: w[n] = hann; break;
      case WindowKind::kRect: w[n] = 1.0; break;
    }
  }
  return w;
}

namespace {

// Interior overlap-add weight of w_analysis * w_synthesis, evaluated for each
// residue class modulo hop. Perfect reconstruction needs this constant.
std::vector<double> ola_weight_per_residue(const std::vector<double>& window, int hop) {
  const int win = static_cast<int>(window.size());
  std::vector<double> s(hop, 0.0);
  for (int n = 0; n < hop; ++n) {
    for (int k = n; k < win; k += hop) s[n] += window[k] * window[k];
  }
  return s;
}

}  // namespace

void StftConfig::validate() const {
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (window_len <= 0 || hop_len <= 0 || fft_len <= 0) {
    throw ConfigError("stft lengths must be positive");
  }
  if (!(hop_len <= window_len && window_len <= fft_len)) {
    throw ConfigError("stft requires hop_len <= window_len <= fft_len");
  }
  if (!Fft::supported_length(fft_len)) {
    throw ConfigError("fft_len " + std::to_string(fft_len) + " has unsupported prime factors");
  }
  const auto window_fn = make_window(window, window_len);
  const auto s = ola_weight_per_residue(window_fn, hop_len);
  const double s0 = s[0];
  if (s0 <= 0.0) throw ConfigError("window/hop pair has vanishing overlap-add weight");
  for (double v : s) {
    if (std::abs(v - s0) > 1e-6 * s0) {
      throw ConfigError("window '" + to_string(window) + "' with hop " +
                        std::to_string(hop_len) + "/" + std::to_string(window_len) +
                        " does not satisfy constant overlap-add");
    }
  }
}

int StftConfig::frames_covering(size_t len) const {
  if (len < static_cast<size_t>(window_len)) return 1;
  const size_t extra = len - window_len;
  return 1 + static_cast<int>((extra + hop_len - 1) / hop_len);
}

namespace {
int checked_fft_len(const StftConfig& cfg) {
  cfg.validate();
  return cfg.fft_len;
}
}  // namespace

Stft::Stft(const StftConfig& cfg) : cfg_(cfg), fft_(checked_fft_len(cfg)) {
  window_ = make_window(cfg_.window, cfg_.window_len);
}

void Stft::analyze_frame(const double* frame, std::complex<double>* bins_out) const {
  thread_local std::vector<std::complex<double>> buf;
  if (static_cast<int>(buf.size()) < cfg_.fft_len) buf.resize(cfg_.fft_len);
  for (int n = 0; n < cfg_.window_len; ++n) buf[n] = frame[n] * window_[n];
  for (int n = cfg_.window_len; n < cfg_.fft_len; ++n) buf[n] = 0.0;
  fft_.forward(buf.data());
  const int bins = cfg_.bins();
  for (int f = 0; f < bins; ++f) bins_out[f] = buf[f];
}

void Stft::synthesize_frame(const std::complex<double>* bins, double* frame_out) const {
  thread_local std::vector<std::complex<double>> buf;
  if (static_cast<int>(buf.size()) < cfg_.fft_len) buf.resize(cfg_.fft_len);
  const int nbins = cfg_.bins();
  for (int f = 0; f < nbins; ++f) buf[f] = bins[f];
  for (int f = nbins; f < cfg_.fft_len; ++f) buf[f] = std::conj(bins[cfg_.fft_len - f]);
  fft_.inverse(buf.data());
  for (int n = 0; n < cfg_.window_len; ++n) frame_out[n] = buf[n].real() * window_[n];
}

ComplexSpectrogram Stft::analyze(const AudioBuffer& audio) const {
  if (audio.sample_rate != cfg_.sample_rate) {
    throw DataError("sample rate mismatch: audio is " + std::to_string(audio.sample_rate) +
                    " Hz, stft configured for " + std::to_string(cfg_.sample_rate) + " Hz");
  }
  const int len = static_cast<int>(audio.samples.size());
  if (len < cfg_.window_len) {
    throw DataError("insufficient input: need at least " + std::to_string(cfg_.window_len) +
                    " samples, got " + std::to_string(len));
  }
  const int frames = (len - cfg_.window_len) / cfg_.hop_len + 1;
  ComplexSpectrogram spec(cfg_.bins(), frames);
  for (int l = 0; l < frames; ++l) {
    analyze_frame(audio.samples.data() + static_cast<size_t>(l) * cfg_.hop_len,
                  &spec.at(0, l));
  }
  return spec;
}

AudioBuffer Stft::synthesize(const ComplexSpectrogram& spec) const {
  if (spec.bins != cfg_.bins()) {
    throw DataError("spectrogram has " + std::to_string(spec.bins) + " bins, expected " +
                    std::to_string(cfg_.bins()));
  }
  const int frames = spec.frames;
  const size_t out_len = static_cast<size_t>(frames - 1) * cfg_.hop_len + cfg_.window_len;
  std::vector<double> out(out_len, 0.0);
  std::vector<double> norm(out_len, 0.0);
  std::vector<double> frame(cfg_.window_len);
  for (int l = 0; l < frames; ++l) {
    synthesize_frame(&spec.at(0, l), frame.data());
    const size_t base = static_cast<size_t>(l) * cfg_.hop_len;
    for (int n = 0; n < cfg_.window_len; ++n) {
      out[base + n] += frame[n];
      norm[base + n] += window_[n] * window_[n];
    }
  }
  for (size_t i = 0; i < out_len; ++i) {
    out[i] = norm[i] > 1e-10 ? out[i] / norm[i] : 0.0;
  }
  return AudioBuffer(std::move(out), cfg_.sample_rate);
}

void CompressionParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("compression alpha must be in (0, 1]");
  if (!(beta > 0.0)) throw ConfigError("compression beta must be positive");
}

std::complex<double> compress_bin(std::complex<double> c, const CompressionParams& p) {
  const double mag = std::abs(c);
  if (mag == 0.0) return {0.0, 0.0};
  return c * (p.beta * std::pow(mag, p.alpha - 1.0));
}

std::complex<double> decompress_bin(std::complex<double> c, const CompressionParams& p) {
  const double mag = std::abs(c);
  if (mag == 0.0) return {0.0, 0.0};
  const double orig = std::pow(mag / p.beta, 1.0 / p.alpha);
  return c * (orig / mag);
}

ComplexSpectrogram compress(const ComplexSpectrogram& spec, const CompressionParams& params) {
  params.validate();
  ComplexSpectrogram out(spec.bins, spec.frames);
  for (size_t i = 0; i < spec.data.size(); ++i) out.data[i] = compress_bin(spec.data[i], params);
  return out;
}

ComplexSpectrogram decompress(const ComplexSpectrogram& spec, const CompressionParams& params) {
  params.validate();
  ComplexSpectrogram out(spec.bins, spec.frames);
  for (size_t i = 0; i < spec.data.size(); ++i) {
    out.data[i] = decompress_bin(spec.data[i], params);
  }
  return out;
}

double rms(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / samples.size());
}

std::pair<AudioBuffer, double> rms_normalize(const AudioBuffer& audio, double target_dbfs) {
  const double level = rms(audio.samples);
  if (level <= 0.0) throw DataError("silent input: cannot normalize all-zero audio");
  const double target = std::pow(10.0, target_dbfs / 20.0);
  const double gain = target / level;
  AudioBuffer out = audio;
  for (double& s : out.samples) s *= gain;
  return {std::move(out), gain};
}

}  // namespace flowsr::dsp
