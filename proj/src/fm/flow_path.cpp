#include "flowsr/fm/flow_path.hpp"

#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::fm {

void FlowPathParams::validate() const {
  if (!(sigma_min >= 0.0)) throw ConfigError("sigma_min must be >= 0");
  if (!(sigma_max > sigma_min)) throw ConfigError("sigma_max must exceed sigma_min");
}

FlowTime::FlowTime(double value) : t(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError("flow time must lie in [0, 1], got " + std::to_string(value));
  }
}

double path_sigma(FlowTime t, const FlowPathParams& p) {
  return (1.0 - t.t) * p.sigma_max + t.t * p.sigma_min;
}

std::pair<dsp::ComplexSpectrogram, double> path_moments(FlowTime t,
                                                        const dsp::ComplexSpectrogram& x1,
                                                        const FlowPathParams& p) {
  p.validate();
  dsp::ComplexSpectrogram mu(x1.bins, x1.frames);
  for (size_t i = 0; i < x1.data.size(); ++i) mu.data[i] = t.t * x1.data[i];
  return {std::move(mu), path_sigma(t, p)};
}

dsp::ComplexSpectrogram sample_xt(const dsp::ComplexSpectrogram& x1, FlowTime t,
                                  const dsp::ComplexSpectrogram& z, const FlowPathParams& p) {
  p.validate();
  if (z.bins != x1.bins || z.frames != x1.frames) {
    throw DataError("sample_xt: noise shape does not match x1");
  }
  const double sigma = path_sigma(t, p);
  dsp::ComplexSpectrogram out(x1.bins, x1.frames);
  for (size_t i = 0; i < x1.data.size(); ++i) {
    out.data[i] = t.t * x1.data[i] + sigma * z.data[i];
  }
  return out;
}

dsp::ComplexSpectrogram target_field(const dsp::ComplexSpectrogram& x_t,
                                     const dsp::ComplexSpectrogram& x1, FlowTime t,
                                     const FlowPathParams& p) {
  p.validate();
  if (x_t.bins != x1.bins || x_t.frames != x1.frames) {
    throw DataError("target_field: x_t shape does not match x1");
  }
  const double sigma = path_sigma(t, p);
  if (sigma == 0.0) {
    throw NumericError("target_field singular: sigma_t = 0 at t = " + std::to_string(t.t));
  }
  const double slope = (p.sigma_min - p.sigma_max) / sigma;
  dsp::ComplexSpectrogram out(x1.bins, x1.frames);
  for (size_t i = 0; i < x1.data.size(); ++i) {
    out.data[i] = x1.data[i] + slope * (x_t.data[i] - t.t * x1.data[i]);
  }
  return out;
}

double cfm_loss(const dsp::ComplexSpectrogram& v_pred,
                const dsp::ComplexSpectrogram& u_target) {
  if (v_pred.bins != u_target.bins || v_pred.frames != u_target.frames) {
    throw DataError("cfm_loss: shape mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < v_pred.data.size(); ++i) {
    const auto d = v_pred.data[i] - u_target.data[i];
    acc += d.real() * d.real() + d.imag() * d.imag();
  }
  return acc / (2.0 * static_cast<double>(v_pred.data.size()));
}

void draw_noise_column(int bins, uint64_t seed, int64_t frame, std::complex<double>* out) {
  util::Rng rng(util::mix_seed(seed, static_cast<uint64_t>(frame), 0x6e6f697365ULL));
  for (int f = 0; f < bins; ++f) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    out[f] = {re, im};
  }
}

dsp::ComplexSpectrogram draw_base_noise(int bins, int frames, uint64_t seed) {
  dsp::ComplexSpectrogram z(bins, frames);
  for (int l = 0; l < frames; ++l) draw_noise_column(bins, seed, l, &z.at(0, l));
  return z;
}

}  // namespace flowsr::fm
