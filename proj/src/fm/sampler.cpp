#include "flowsr/fm/sampler.hpp"

#include "flowsr/util/error.hpp"

namespace flowsr::fm {

OdeScheme scheme_from_string(const std::string& name) {
  if (name == "euler") return OdeScheme::kEuler;
  if (name == "midpoint") return OdeScheme::kMidpoint;
  throw ConfigError("unknown sampler scheme: " + name);
}

std::string to_string(OdeScheme scheme) {
  return scheme == OdeScheme::kEuler ? "euler" : "midpoint";
}

void SamplerConfig::validate() const {
  if (nfe < 1) throw ConfigError("nfe must be >= 1");
  if (scheme == OdeScheme::kMidpoint && nfe % 2 != 0) {
    throw ConfigError("midpoint scheme needs an even nfe (2 evaluations per step), got " +
                      std::to_string(nfe));
  }
}

std::vector<double> SamplerConfig::evaluation_times() const {
  validate();
  std::vector<double> times;
  times.reserve(nfe);
  const double h = step_size();
  for (int j = 0; j < steps(); ++j) {
    if (scheme == OdeScheme::kEuler) {
      times.push_back(j * h);
    } else {
      times.push_back(j * h);
      times.push_back(j * h + 0.5 * h);
    }
  }
  return times;
}

dsp::ComplexSpectrogram integrate_ode(const VelocityFieldFn& v, dsp::ComplexSpectrogram x0,
                                      const dsp::ComplexSpectrogram& cond,
                                      const SamplerConfig& cfg, int64_t* eval_count) {
  cfg.validate();
  dsp::ComplexSpectrogram x = std::move(x0);
  const double h = cfg.step_size();
  int64_t evals = 0;
  for (int j = 0; j < cfg.steps(); ++j) {
    const double t = j * h;
    if (cfg.scheme == OdeScheme::kEuler) {
      const auto vel = v(x, cond, t);
      ++evals;
      for (size_t i = 0; i < x.data.size(); ++i) x.data[i] += h * vel.data[i];
    } else {
      const auto v1 = v(x, cond, t);
      ++evals;
      dsp::ComplexSpectrogram mid(x.bins, x.frames);
      for (size_t i = 0; i < x.data.size(); ++i) {
        mid.data[i] = x.data[i] + 0.5 * h * v1.data[i];
      }
      const auto v2 = v(mid, cond, t + 0.5 * h);
      ++evals;
      for (size_t i = 0; i < x.data.size(); ++i) x.data[i] += h * v2.data[i];
    }
  }
  if (eval_count) *eval_count = evals;
  return x;
}

}  // namespace flowsr::fm
