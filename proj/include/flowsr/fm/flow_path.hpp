#pragma once

#include <cstdint>
#include <utility>

#include "flowsr/dsp/audio_buffer.hpp"

namespace flowsr::fm {

// Gaussian conditional path: mean(t) = t * x1, sigma(t) linearly interpolated
// from sigma_max at t=0 down to sigma_min at t=1. Trajectories for a fixed
// base draw z are straight lines, so the transporting field is constant
// along each of them.
struct FlowPathParams {
  double sigma_min = 1e-4;
  double sigma_max = 1.0;

  void validate() const;
};

struct FlowTime {
  double t = 0.0;
  FlowTime() = default;
  explicit FlowTime(double value);  // throws ConfigError outside [0, 1]
};

double path_sigma(FlowTime t, const FlowPathParams& p);

// (mu_t, sigma_t): mu_t = t * x1 elementwise.
std::pair<dsp::ComplexSpectrogram, double> path_moments(FlowTime t,
                                                        const dsp::ComplexSpectrogram& x1,
                                                        const FlowPathParams& p);

// x_t = mu_t + sigma_t * z, real and imaginary parts as independent
// coordinates. z must match x1's shape.
dsp::ComplexSpectrogram sample_xt(const dsp::ComplexSpectrogram& x1, FlowTime t,
                                  const dsp::ComplexSpectrogram& z, const FlowPathParams& p);

// The field transporting the path: u(x) = x1 + (sigma_min - sigma_max)/sigma_t
// * (x - t*x1). On-path this equals d/dt [t*x1 + sigma_t*z] =
// x1 + (sigma_min - sigma_max)*z. Throws NumericError when sigma_t == 0.
dsp::ComplexSpectrogram target_field(const dsp::ComplexSpectrogram& x_t,
                                     const dsp::ComplexSpectrogram& x1, FlowTime t,
                                     const FlowPathParams& p);

// Mean squared error over all real coordinates.
double cfm_loss(const dsp::ComplexSpectrogram& v_pred, const dsp::ComplexSpectrogram& u_target);

// Unit-variance complex-coordinate noise; column l is a deterministic
// function of (seed, l) so frame-synchronous consumers can reproduce it.
dsp::ComplexSpectrogram draw_base_noise(int bins, int frames, uint64_t seed);
void draw_noise_column(int bins, uint64_t seed, int64_t frame, std::complex<double>* out);

}  // namespace flowsr::fm
