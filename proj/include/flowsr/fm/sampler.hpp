#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flowsr/dsp/audio_buffer.hpp"
#include "flowsr/fm/flow_path.hpp"

namespace flowsr::fm {

enum class OdeScheme { kEuler, kMidpoint };

OdeScheme scheme_from_string(const std::string& name);
std::string to_string(OdeScheme scheme);

// nfe counts velocity-field evaluations, the budget axis everything else is
// measured against. Midpoint spends two evaluations per step, so it needs an
// even nfe.
struct SamplerConfig {
  int nfe = 5;
  OdeScheme scheme = OdeScheme::kEuler;

  void validate() const;
  int steps() const { return scheme == OdeScheme::kMidpoint ? nfe / 2 : nfe; }
  double step_size() const { return 1.0 / steps(); }

  // Times at which the field is evaluated, in evaluation order. Fixed per
  // evaluation index, which is what lets a streaming engine pin one causal
  // network state per index.
  std::vector<double> evaluation_times() const;
};

using VelocityFieldFn = std::function<dsp::ComplexSpectrogram(
    const dsp::ComplexSpectrogram& x_t, const dsp::ComplexSpectrogram& cond, double t)>;

// Explicit integration of dx/dt = v(x, cond, t) from t=0 to t=1 on the
// uniform grid. Performs exactly cfg.nfe field evaluations.
dsp::ComplexSpectrogram integrate_ode(const VelocityFieldFn& v, dsp::ComplexSpectrogram x0,
                                      const dsp::ComplexSpectrogram& cond,
                                      const SamplerConfig& cfg,
                                      int64_t* eval_count = nullptr);

}  // namespace flowsr::fm
