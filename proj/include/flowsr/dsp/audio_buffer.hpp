#pragma once

#include <complex>
#include <vector>

namespace flowsr::dsp {

struct AudioBuffer {
  std::vector<double> samples;  // nominal range [-1, 1]
  int sample_rate = 0;          // Hz

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// F x L complex values, stored frame-major: data[l * bins + f].
struct ComplexSpectrogram {
  int bins = 0;    // F
  int frames = 0;  // L
  std::vector<std::complex<double>> data;

  ComplexSpectrogram() = default;
  ComplexSpectrogram(int f, int l) : bins(f), frames(l), data(static_cast<size_t>(f) * l) {}

  std::complex<double>& at(int f, int l) { return data[static_cast<size_t>(l) * bins + f]; }
  const std::complex<double>& at(int f, int l) const {
    return data[static_cast<size_t>(l) * bins + f];
  }
};

double rms(const std::vector<double>& samples);

// Scales audio so its RMS hits target_dbfs (dB re full scale). Returns the
// scaled buffer and the gain that was applied. Throws DataError on silence.
std::pair<AudioBuffer, double> rms_normalize(const AudioBuffer& audio, double target_dbfs);

}  // namespace flowsr::dsp
