#pragma once

#include "flowsr/dsp/stft.hpp"

namespace flowsr::eval {

// Scale-invariant SDR in dB, capped at +60 (a perfect or purely rescaled
// estimate hits the cap). Throws DataError on length mismatch or a silent
// reference.
double si_sdr_db(const std::vector<double>& reference, const std::vector<double>& estimate);

// Log-spectral distance: per-frame RMS of the log10 magnitude gap times 20,
// then RMS over frames; magnitudes floored at 1e-8.
double lsd_db(const dsp::ComplexSpectrogram& reference, const dsp::ComplexSpectrogram& estimate);

// ||  |R| - |E|  ||_F / || |R| ||_F
double spectral_convergence(const dsp::ComplexSpectrogram& reference,
                            const dsp::ComplexSpectrogram& estimate);

struct ClipMetrics {
  double si_sdr = 0.0;
  double lsd = 0.0;
  double spectral_conv = 0.0;
};

ClipMetrics compute_metrics(const dsp::AudioBuffer& reference, const dsp::AudioBuffer& estimate,
                            const dsp::StftConfig& stft_cfg);

}  // namespace flowsr::eval
