#pragma once

#include <complex>
#include <vector>

namespace flowsr::dsp {

// Mixed-radix complex FFT for lengths of the form 2^a * 3^b * 5^c.
// Self-contained so results are bit-reproducible across runs and builds.
class Fft {
 public:
  explicit Fft(int n);  // throws ConfigError for unsupported lengths

  int size() const { return n_; }

  void forward(std::complex<double>* data) const;
  void inverse(std::complex<double>* data) const;  // scales by 1/n

  static bool supported_length(int n);

 private:
  void transform(std::complex<double>* data, bool inverse) const;
  void recurse(std::complex<double>* out, const std::complex<double>* in, int n, int stride,
               std::complex<double>* scratch,
               const std::vector<std::complex<double>>& twiddle) const;

  int n_;
  std::vector<std::complex<double>> twiddle_fwd_;
  std::vector<std::complex<double>> twiddle_inv_;
};

}  // namespace flowsr::dsp
