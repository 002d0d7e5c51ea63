#pragma once

#include <memory>
#include <string>

#include "flowsr/dsp/audio_buffer.hpp"
#include "flowsr/dsp/fft.hpp"

namespace flowsr::dsp {

enum class WindowKind { kSqrtHann, kHann, kRect };

WindowKind window_kind_from_string(const std::string& name);
std::string to_string(WindowKind kind);

// Analysis/synthesis framing. The same window is used on both sides, and the
// pair must satisfy constant overlap-add at the configured hop; this is
// checked numerically at construction. Frames never read future samples, so
// the algorithmic latency is exactly window_len / sample_rate.
struct StftConfig {
  int sample_rate = 16000;
  int window_len = 320;  // 20 ms
  int hop_len = 160;     // 10 ms
  int fft_len = 320;
  WindowKind window = WindowKind::kSqrtHann;

  void validate() const;  // throws ConfigError
  int bins() const { return fft_len / 2 + 1; }
  double algorithmic_latency_seconds() const {
    return static_cast<double>(window_len) / sample_rate;
  }
  // Frames needed to cover `len` samples when the tail is zero-padded.
  int frames_covering(size_t len) const;
};

std::vector<double> make_window(WindowKind kind, int len);

class Stft {
 public:
  explicit Stft(const StftConfig& cfg);

  const StftConfig& config() const { return cfg_; }

  // L = floor((len - window_len) / hop_len) + 1; frame l covers samples
  // [l*hop, l*hop + window_len). Throws DataError for inputs shorter than
  // one window.
  ComplexSpectrogram analyze(const AudioBuffer& audio) const;

  // Overlap-add synthesis with per-sample window-energy normalization;
  // output length is (L-1)*hop + window_len.
  AudioBuffer synthesize(const ComplexSpectrogram& spec) const;

  // Single-frame helpers shared with the streaming engine so both paths run
  // the identical arithmetic.
  void analyze_frame(const double* frame, std::complex<double>* bins_out) const;
  void synthesize_frame(const std::complex<double>* bins, double* frame_out) const;

  const std::vector<double>& window() const { return window_; }

 private:
  StftConfig cfg_;
  std::vector<double> window_;
  Fft fft_;
};

struct CompressionParams {
  double alpha = 0.5;  // exponent in (0, 1]
  double beta = 0.15;  // scale > 0

  void validate() const;
};

// c -> beta * |c|^alpha * exp(i*angle(c)); zero maps to zero, phase is kept.
ComplexSpectrogram compress(const ComplexSpectrogram& spec, const CompressionParams& params);
ComplexSpectrogram decompress(const ComplexSpectrogram& spec, const CompressionParams& params);

std::complex<double> compress_bin(std::complex<double> c, const CompressionParams& params);
std::complex<double> decompress_bin(std::complex<double> c, const CompressionParams& params);

}  // namespace flowsr::dsp
