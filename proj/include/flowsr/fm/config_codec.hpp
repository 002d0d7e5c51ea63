#pragma once

#include "flowsr/dsp/stft.hpp"
#include "flowsr/fm/flow_path.hpp"
#include "flowsr/fm/sampler.hpp"
#include "flowsr/util/kv_config.hpp"

namespace flowsr::fm {

// KvConfig encodings shared by config files, checkpoints and provenance
// echoes. Key prefixes: stft.*, compress.*, flow.*, sampler.*.
void encode_stft(util::KvConfig& kv, const dsp::StftConfig& cfg);
dsp::StftConfig decode_stft(const util::KvConfig& kv);

void encode_compression(util::KvConfig& kv, const dsp::CompressionParams& params);
dsp::CompressionParams decode_compression(const util::KvConfig& kv);

void encode_flow(util::KvConfig& kv, const FlowPathParams& params);
FlowPathParams decode_flow(const util::KvConfig& kv);

void encode_sampler(util::KvConfig& kv, const SamplerConfig& cfg);
SamplerConfig decode_sampler(const util::KvConfig& kv);

}  // namespace flowsr::fm
