#include "flowsr/models/complexity.hpp"

#include <sstream>

namespace flowsr::models {

ComplexityReport count_complexity(const std::vector<LayerInfo>& layers,
                                  const dsp::StftConfig& stft) {
  ComplexityReport report;
  const double frames_per_second =
      static_cast<double>(stft.sample_rate) / static_cast<double>(stft.hop_len);
  int64_t rf_frames = 1;
  for (const auto& layer : layers) {
    report.params += layer.params;
    report.macs_per_second += static_cast<double>(layer.macs_per_frame) * frames_per_second;
    if (layer.on_serial_path) {
      rf_frames += static_cast<int64_t>(layer.kernel_t - 1) * layer.dilation_t;
    }
  }
  report.receptive_field_seconds =
      static_cast<double>(rf_frames) * stft.hop_len / stft.sample_rate;
  report.receptive_field_frames = rf_frames;
  return report;
}

std::string ComplexityReport::to_string() const {
  std::ostringstream os;
  os.precision(4);
  os << "params: " << params << " (" << params / 1e6 << " M)\n";
  os << "macs_per_second: " << macs_per_second << " (" << macs_per_second / 1e9 << " G)\n";
  os << "receptive_field: " << receptive_field_seconds << " s (" << receptive_field_frames
     << " frames)\n";
  return os.str();
}

}  // namespace flowsr::models
