#include "flowsr/models/presets.hpp"

#include "flowsr/models/causal_freq_unet.hpp"
#include "flowsr/models/convglu_unet.hpp"
#include "flowsr/util/error.hpp"

namespace flowsr::models {

std::vector<std::string> preset_names() {
  return {"convglu-toy", "convglu-base", "convglu-large", "freq-unet-lite"};
}

bool is_preset(const std::string& name) {
  for (const auto& p : preset_names()) {
    if (p == name) return true;
  }
  return false;
}

std::unique_ptr<Backbone> build_preset(const std::string& name, int bins, uint64_t init_seed) {
  if (name == "convglu-toy" || name == "convglu-base" || name == "convglu-large") {
    ConvGluUnetConfig cfg;
    cfg.bins = bins;
    cfg.init_seed = init_seed;
    if (name == "convglu-toy") {
      cfg.encoder_channels = {32, 16, 8};
    } else if (name == "convglu-base") {
      cfg.encoder_channels = {1024, 512, 256, 128, 64, 32};
    } else {
      cfg.encoder_channels = {4096, 2048, 1024, 512, 256, 128};
    }
    return std::make_unique<ConvGluUnet>(cfg);
  }
  if (name == "freq-unet-lite") {
    CausalFreqUnetConfig cfg;
    cfg.bins = bins;
    cfg.init_seed = init_seed;
    return std::make_unique<CausalFreqUnet>(cfg);
  }
  throw ConfigError("unknown backbone preset: " + name);
}

std::unique_ptr<Backbone> build_from_config(const util::KvConfig& kv) {
  const std::string kind = kv.get_string("model.kind");
  if (kind == "convglu_unet") {
    return std::make_unique<ConvGluUnet>(ConvGluUnetConfig::from_config(kv));
  }
  if (kind == "causal_freq_unet") {
    return std::make_unique<CausalFreqUnet>(CausalFreqUnetConfig::from_config(kv));
  }
  throw ConfigError("unknown model kind: " + kind);
}

}  // namespace flowsr::models
