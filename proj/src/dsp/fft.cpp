#include "flowsr/dsp/fft.hpp"

#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::dsp {

namespace {
using cd = std::complex<double>;
}

bool Fft::supported_length(int n) {
  if (n < 1) return false;
  for (int r : {2, 3, 5}) {
    while (n % r == 0) n /= r;
  }
  return n == 1;
}

Fft::Fft(int n) : n_(n) {
  if (!supported_length(n)) {
    throw ConfigError("fft length " + std::to_string(n) +
                      " not supported (factors must be 2, 3, 5)");
  }
  twiddle_fwd_.resize(n_);
  twiddle_inv_.resize(n_);
  for (int k = 0; k < n_; ++k) {
    const double ang = -2.0 * M_PI * k / n_;
    twiddle_fwd_[k] = cd(std::cos(ang), std::sin(ang));
    twiddle_inv_[k] = std::conj(twiddle_fwd_[k]);
  }
}

void Fft::recurse(cd* out, const cd* in, int n, int stride, cd* scratch,
                  const std::vector<cd>& tw) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const int r = (n % 2 == 0) ? 2 : (n % 3 == 0) ? 3 : 5;
  const int m = n / r;
  for (int j = 0; j < r; ++j) {
    recurse(out + static_cast<ptrdiff_t>(j) * m, in + static_cast<ptrdiff_t>(j) * stride, m,
            stride * r, scratch, tw);
  }
  // Combine the r sub-transforms. Twiddles for any divisor length n come from
  // the full-size table: w_n^q == tw[(N/n) * q mod N].
  const int64_t step = n_ / n;
  cd t[5];
  for (int k2 = 0; k2 < m; ++k2) {
    for (int j = 0; j < r; ++j) {
      const int64_t idx = (step * j * k2) % n_;
      t[j] = out[static_cast<ptrdiff_t>(j) * m + k2] * tw[idx];
    }
    for (int p = 0; p < r; ++p) {
      cd acc = t[0];
      for (int j = 1; j < r; ++j) {
        const int64_t idx = (static_cast<int64_t>(n_ / r) * j * p) % n_;
        acc += t[j] * tw[idx];
      }
      scratch[static_cast<ptrdiff_t>(p) * m + k2] = acc;
    }
  }
  for (int i = 0; i < n; ++i) out[i] = scratch[i];
}

void Fft::transform(cd* data, bool inverse) const {
  thread_local std::vector<cd> inbuf;
  thread_local std::vector<cd> scratch;
  if (static_cast<int>(inbuf.size()) < n_) inbuf.resize(n_);
  if (static_cast<int>(scratch.size()) < n_) scratch.resize(n_);
  for (int i = 0; i < n_; ++i) inbuf[i] = data[i];
  recurse(data, inbuf.data(), n_, 1, scratch.data(), inverse ? twiddle_inv_ : twiddle_fwd_);
  if (inverse) {
    const double s = 1.0 / n_;
    for (int i = 0; i < n_; ++i) data[i] *= s;
  }
}

void Fft::forward(cd* data) const { transform(data, false); }
void Fft::inverse(cd* data) const { transform(data, true); }

}  // namespace flowsr::dsp
