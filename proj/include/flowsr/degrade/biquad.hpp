#pragma once

#include <string>
#include <vector>

namespace flowsr::degrade {

// Second-order section, direct form II transposed, zero initial state.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;  // numerator
  double a1 = 0.0, a2 = 0.0;            // denominator (a0 normalized to 1)
};

enum class FilterType { kLowpass, kHighpass, kBandpass };

FilterType filter_type_from_string(const std::string& name);
std::string to_string(FilterType type);

// Butterworth cascade via bilinear transform with frequency prewarp. The
// cascade magnitude at the cutoff is exactly -3.01 dB for lowpass/highpass.
// Bandpass is realized as highpass(cutoff/sqrt(2)) o lowpass(cutoff*sqrt(2)),
// a one-octave band centred on the cutoff. Throws ConfigError for cutoffs at
// or beyond Nyquist.
std::vector<Biquad> butterworth(FilterType type, int order, double cutoff_hz,
                                int sample_rate);

std::vector<double> filter_cascade(const std::vector<Biquad>& sections,
                                   const std::vector<double>& x);

// |H(e^{jw})| of the cascade at the given frequency.
double cascade_magnitude(const std::vector<Biquad>& sections, double freq_hz, int sample_rate);

}  // namespace flowsr::degrade
