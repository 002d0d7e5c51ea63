#include "flowsr/degrade/biquad.hpp"

#include <cmath>
#include <complex>

#include "flowsr/util/error.hpp"

namespace flowsr::degrade {

FilterType filter_type_from_string(const std::string& name) {
  if (name == "lowpass") return FilterType::kLowpass;
  if (name == "highpass") return FilterType::kHighpass;
  if (name == "bandpass") return FilterType::kBandpass;
  throw ConfigError("unknown filter type: " + name);
}

std::string to_string(FilterType type) {
  switch (type) {
    case FilterType::kLowpass: return "lowpass";
    case FilterType::kHighpass: return "highpass";
    case FilterType::kBandpass: return "bandpass";
  }
  return "?";
}

namespace {

// One-sided Butterworth prototype pole pair at angle theta from the
// imaginary axis; odd orders get a final real pole (theta = pi/2).
std::vector<Biquad> design_half(bool highpass, int order, double cutoff_hz, int sample_rate) {
  if (order < 1) throw ConfigError("filter order must be >= 1");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * sample_rate) {
    throw ConfigError("cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, Nyquist) at " +
                      std::to_string(sample_rate) + " Hz");
  }
  const double wc = std::tan(M_PI * cutoff_hz / sample_rate);  // prewarped
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = M_PI * (2.0 * k + 1.0) / (2.0 * order);
    const double q = 2.0 * std::sin(theta);
    const double a0 = 1.0 + q * wc + wc * wc;
    Biquad s;
    if (!highpass) {
      s.b0 = wc * wc / a0;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = 1.0 / a0;
      s.b1 = -2.0 * s.b0;
      s.b2 = s.b0;
    }
    s.a1 = 2.0 * (wc * wc - 1.0) / a0;
    s.a2 = (1.0 - q * wc + wc * wc) / a0;
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double a0 = 1.0 + wc;
    Biquad s;
    if (!highpass) {
      s.b0 = wc / a0;
      s.b1 = s.b0;
    } else {
      s.b0 = 1.0 / a0;
      s.b1 = -s.b0;
    }
    s.a1 = (wc - 1.0) / a0;
    s.a2 = 0.0;
    sections.push_back(s);
  }
  return sections;
}

}  // namespace

std::vector<Biquad> butterworth(FilterType type, int order, double cutoff_hz,
                                int sample_rate) {
  switch (type) {
    case FilterType::kLowpass: return design_half(false, order, cutoff_hz, sample_rate);
    case FilterType::kHighpass: return design_half(true, order, cutoff_hz, sample_rate);
    case FilterType::kBandpass: {
      const double lo = cutoff_hz / M_SQRT2;
      const double hi = cutoff_hz * M_SQRT2;
      auto sections = design_half(true, order, lo, sample_rate);
      auto lowside = design_half(false, order, hi, sample_rate);
      sections.insert(sections.end(), lowside.begin(), lowside.end());
      return sections;
    }
  }
  throw ConfigError("unreachable filter type");
}

std::vector<double> filter_cascade(const std::vector<Biquad>& sections,
                                   const std::vector<double>& x) {
  std::vector<double> y = x;
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

double cascade_magnitude(const std::vector<Biquad>& sections, double freq_hz, int sample_rate) {
  const double w = 2.0 * M_PI * freq_hz / sample_rate;
  const std::complex<double> z_inv = std::exp(std::complex<double>(0.0, -w));
  std::complex<double> h = 1.0;
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z_inv + s.b2 * z_inv * z_inv) /
         (1.0 + s.a1 * z_inv + s.a2 * z_inv * z_inv);
  }
  return std::abs(h);
}

}  // namespace flowsr::degrade
