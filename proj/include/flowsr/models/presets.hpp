#pragma once

#include <memory>
#include <string>

#include "flowsr/models/backbone.hpp"

namespace flowsr::models {

// Named presets resolvable from the CLI:
//   convglu-toy    (32,16,8)                  desk-scale training
//   convglu-base   (1024,512,256,128,64,32)   ~6M params
//   convglu-large  (4096,2048,1024,512,256,128)
//   freq-unet-lite 5-scale pyramid, widths (8,16,24,32,40)
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);

std::unique_ptr<Backbone> build_preset(const std::string& name, int bins,
                                       uint64_t init_seed = 0x5eed);

// Rebuild a backbone from a config echo (as stored in checkpoints).
std::unique_ptr<Backbone> build_from_config(const util::KvConfig& kv);

}  // namespace flowsr::models
