#include "flowsr/eval/metrics.hpp"

#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::eval {

namespace {
constexpr double kSiSdrCapDb = 60.0;
constexpr double kMagFloor = 1e-8;
}  // namespace

double si_sdr_db(const std::vector<double>& reference, const std::vector<double>& estimate) {
  if (reference.size() != estimate.size()) {
    throw DataError("si_sdr: reference and estimate lengths differ");
  }
  double dot = 0.0, ref_energy = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    dot += estimate[i] * reference[i];
    ref_energy += reference[i] * reference[i];
  }
  if (ref_energy <= 0.0) throw DataError("si_sdr: silent reference");
  const double alpha = dot / ref_energy;
  double target_energy = 0.0, error_energy = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const double target = alpha * reference[i];
    const double err = estimate[i] - target;
    target_energy += target * target;
    error_energy += err * err;
  }
  if (error_energy <= 0.0 || target_energy <= 0.0) return kSiSdrCapDb;
  const double db = 10.0 * std::log10(target_energy / error_energy);
  return std::min(db, kSiSdrCapDb);
}

double lsd_db(const dsp::ComplexSpectrogram& reference,
              const dsp::ComplexSpectrogram& estimate) {
  if (reference.bins != estimate.bins || reference.frames != estimate.frames) {
    throw DataError("lsd: spectrogram shapes differ");
  }
  double frame_acc = 0.0;
  for (int l = 0; l < reference.frames; ++l) {
    double acc = 0.0;
    for (int f = 0; f < reference.bins; ++f) {
      const double r = std::max(std::abs(reference.at(f, l)), kMagFloor);
      const double e = std::max(std::abs(estimate.at(f, l)), kMagFloor);
      const double d = std::log10(r) - std::log10(e);
      acc += d * d;
    }
    frame_acc += acc / reference.bins;  // per-frame mean square
  }
  return 20.0 * std::sqrt(frame_acc / reference.frames);
}

double spectral_convergence(const dsp::ComplexSpectrogram& reference,
                            const dsp::ComplexSpectrogram& estimate) {
  if (reference.bins != estimate.bins || reference.frames != estimate.frames) {
    throw DataError("spectral_convergence: spectrogram shapes differ");
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < reference.data.size(); ++i) {
    const double r = std::abs(reference.data[i]);
    const double e = std::abs(estimate.data[i]);
    num += (r - e) * (r - e);
    den += r * r;
  }
  if (den <= 0.0) throw DataError("spectral_convergence: silent reference");
  return std::sqrt(num / den);
}

ClipMetrics compute_metrics(const dsp::AudioBuffer& reference, const dsp::AudioBuffer& estimate,
                            const dsp::StftConfig& stft_cfg) {
  ClipMetrics m;
  m.si_sdr = si_sdr_db(reference.samples, estimate.samples);
  const dsp::Stft stft(stft_cfg);
  const auto ref_spec = stft.analyze(reference);
  const auto est_spec = stft.analyze(estimate);
  m.lsd = lsd_db(ref_spec, est_spec);
  m.spectral_conv = spectral_convergence(ref_spec, est_spec);
  return m;
}

}  // namespace flowsr::eval
