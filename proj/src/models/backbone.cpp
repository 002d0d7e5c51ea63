#include "flowsr/models/backbone.hpp"

namespace flowsr::models {

int64_t Backbone::param_count() {
  int64_t total = 0;
  for (const auto* p : parameters()) total += p->value.size();
  return total;
}

fm::VelocityFieldFn Backbone::velocity_field() const {
  return [this](const dsp::ComplexSpectrogram& x_t, const dsp::ComplexSpectrogram& cond,
                double t) {
    return unpack_spectrogram(forward(pack_spectrogram(x_t), pack_spectrogram(cond), t));
  };
}

nn::Tensor pack_spectrogram(const dsp::ComplexSpectrogram& spec) {
  nn::Tensor out({2 * spec.bins, spec.frames});
  for (int f = 0; f < spec.bins; ++f) {
    double* re = out.data() + static_cast<int64_t>(f) * spec.frames;
    double* im = out.data() + static_cast<int64_t>(spec.bins + f) * spec.frames;
    for (int l = 0; l < spec.frames; ++l) {
      const auto& c = spec.at(f, l);
      re[l] = c.real();
      im[l] = c.imag();
    }
  }
  return out;
}

dsp::ComplexSpectrogram unpack_spectrogram(const nn::Tensor& t) {
  const int bins = t.dim(0) / 2;
  const int frames = t.dim(1);
  dsp::ComplexSpectrogram spec(bins, frames);
  for (int f = 0; f < bins; ++f) {
    const double* re = t.data() + static_cast<int64_t>(f) * frames;
    const double* im = t.data() + static_cast<int64_t>(bins + f) * frames;
    for (int l = 0; l < frames; ++l) spec.at(f, l) = {re[l], im[l]};
  }
  return spec;
}

void pack_column(const std::complex<double>* col, int bins, double* out) {
  for (int f = 0; f < bins; ++f) {
    out[f] = col[f].real();
    out[bins + f] = col[f].imag();
  }
}

void unpack_column(const double* in, int bins, std::complex<double>* col) {
  for (int f = 0; f < bins; ++f) col[f] = {in[f], in[bins + f]};
}

}  // namespace flowsr::models
