#include "flowsr/degrade/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::degrade {

using nlohmann::json;

DegradationKind kind_from_string(const std::string& name) {
  if (name == "additive_noise") return DegradationKind::kAdditiveNoise;
  if (name == "reverb") return DegradationKind::kReverb;
  if (name == "bandlimit") return DegradationKind::kBandlimit;
  if (name == "clip") return DegradationKind::kClip;
  if (name == "codec_proxy") return DegradationKind::kCodecProxy;
  if (name == "tf_mask") return DegradationKind::kTfMask;
  if (name == "level_shift") return DegradationKind::kLevelShift;
  throw ConfigError("unknown degradation kind: " + name);
}

std::string to_string(DegradationKind kind) {
  switch (kind) {
    case DegradationKind::kAdditiveNoise: return "additive_noise";
    case DegradationKind::kReverb: return "reverb";
    case DegradationKind::kBandlimit: return "bandlimit";
    case DegradationKind::kClip: return "clip";
    case DegradationKind::kCodecProxy: return "codec_proxy";
    case DegradationKind::kTfMask: return "tf_mask";
    case DegradationKind::kLevelShift: return "level_shift";
  }
  return "?";
}

void DegradationSpec::validate() const {
  switch (kind) {
    case DegradationKind::kReverb:
      if (!(t60_s > 0.0)) throw ConfigError("reverb: t60_s must be positive");
      break;
    case DegradationKind::kBandlimit:
      if (!(cutoff_hz > 0.0)) throw ConfigError("bandlimit: cutoff_hz must be positive");
      if (order < 1) throw ConfigError("bandlimit: order must be >= 1");
      break;
    case DegradationKind::kClip:
      if (!(threshold > 0.0)) throw ConfigError("clip: threshold must be positive");
      break;
    case DegradationKind::kCodecProxy:
      if (bit_depth < 4 || bit_depth > 16) throw ConfigError("codec_proxy: bit_depth in [4,16]");
      if (decimation != 1 && decimation != 2 && decimation != 4) {
        throw ConfigError("codec_proxy: decimation in {1,2,4}");
      }
      break;
    case DegradationKind::kTfMask:
      if (patch_count < 0 || max_f < 1 || max_l < 1) throw ConfigError("tf_mask: bad params");
      break;
    default:
      break;
  }
}

json DegradationSpec::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case DegradationKind::kAdditiveNoise:
      if (std::isinf(snr_db)) {
        j["snr_db"] = "inf";
      } else {
        j["snr_db"] = snr_db;
      }
      j["noise"] = noise_kind;
      break;
    case DegradationKind::kReverb:
      j["t60_s"] = t60_s;
      j["direct_ratio"] = direct_ratio;
      break;
    case DegradationKind::kBandlimit:
      j["cutoff_hz"] = cutoff_hz;
      j["order"] = order;
      j["type"] = degrade::to_string(filter_type);
      break;
    case DegradationKind::kClip:
      j["threshold"] = threshold;
      j["hardness"] = hard ? "hard" : "soft";
      break;
    case DegradationKind::kCodecProxy:
      j["bit_depth"] = bit_depth;
      j["decimation"] = decimation;
      break;
    case DegradationKind::kTfMask:
      j["patch_count"] = patch_count;
      j["max_f"] = max_f;
      j["max_l"] = max_l;
      break;
    case DegradationKind::kLevelShift:
      j["gain_db"] = gain_db;
      break;
  }
  return j;
}

DegradationSpec DegradationSpec::from_json(const json& j) {
  DegradationSpec s;
  s.kind = kind_from_string(j.at("kind").get<std::string>());
  switch (s.kind) {
    case DegradationKind::kAdditiveNoise:
      if (j.contains("snr_db")) {
        if (j["snr_db"].is_string()) {
          s.snr_db = std::numeric_limits<double>::infinity();
        } else {
          s.snr_db = j["snr_db"].get<double>();
        }
      }
      s.noise_kind = j.value("noise", "any");
      break;
    case DegradationKind::kReverb:
      s.t60_s = j.at("t60_s").get<double>();
      s.direct_ratio = j.value("direct_ratio", 1.0);
      break;
    case DegradationKind::kBandlimit:
      s.cutoff_hz = j.at("cutoff_hz").get<double>();
      s.order = j.value("order", 8);
      s.filter_type = filter_type_from_string(j.value("type", "lowpass"));
      break;
    case DegradationKind::kClip:
      s.threshold = j.at("threshold").get<double>();
      s.hard = j.value("hardness", "hard") == "hard";
      break;
    case DegradationKind::kCodecProxy:
      s.bit_depth = j.value("bit_depth", 8);
      s.decimation = j.value("decimation", 1);
      break;
    case DegradationKind::kTfMask:
      s.patch_count = j.value("patch_count", 2);
      s.max_f = j.value("max_f", 24);
      s.max_l = j.value("max_l", 16);
      break;
    case DegradationKind::kLevelShift:
      s.gain_db = j.at("gain_db").get<double>();
      break;
  }
  s.validate();
  return s;
}

json DegradationChain::to_json() const {
  json j;
  j["seed"] = rng_seed;
  j["ops"] = json::array();
  for (const auto& op : ops) j["ops"].push_back(op.to_json());
  return j;
}

DegradationChain DegradationChain::from_json(const json& j) {
  DegradationChain chain;
  chain.rng_seed = j.value("seed", 0ULL);
  for (const auto& op : j.at("ops")) chain.ops.push_back(DegradationSpec::from_json(op));
  return chain;
}

DegradationChain DegradationChain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open chain file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed chain file " + path + ": " + e.what());
  }
  return from_json(j);
}

void DegradationChain::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write chain file: " + path);
  out << to_json().dump(2) << "\n";
}

namespace {

// Mask patches operate on the analysis grid; the audio is padded to full
// frames and trimmed back after synthesis.
dsp::AudioBuffer mask_via_stft(const dsp::AudioBuffer& audio, const DegradationSpec& spec,
                               uint64_t seed, const dsp::StftConfig& cfg, json& prov_op) {
  const dsp::Stft stft(cfg);
  const size_t original_len = audio.samples.size();
  const int frames = cfg.frames_covering(original_len);
  dsp::AudioBuffer padded = audio;
  padded.samples.resize(static_cast<size_t>(frames - 1) * cfg.hop_len + cfg.window_len, 0.0);
  auto spec_in = stft.analyze(padded);
  std::vector<MaskRect> rects;
  const int max_f = std::min(spec.max_f, spec_in.bins);
  const int max_l = std::min(spec.max_l, spec_in.frames);
  auto masked = apply_tf_mask(spec_in, spec.patch_count, max_f, max_l, seed, &rects);
  prov_op["patches"] = json::array();
  for (const auto& r : rects) {
    prov_op["patches"].push_back({{"f0", r.f0}, {"l0", r.l0}, {"fw", r.fw}, {"lw", r.lw}});
  }
  auto out = stft.synthesize(masked);
  out.samples.resize(original_len);
  return out;
}

dsp::AudioBuffer replay_mask(const dsp::AudioBuffer& audio, const json& prov_op,
                             const dsp::StftConfig& cfg) {
  const dsp::Stft stft(cfg);
  const size_t original_len = audio.samples.size();
  const int frames = cfg.frames_covering(original_len);
  dsp::AudioBuffer padded = audio;
  padded.samples.resize(static_cast<size_t>(frames - 1) * cfg.hop_len + cfg.window_len, 0.0);
  std::vector<MaskRect> rects;
  for (const auto& p : prov_op.at("patches")) {
    rects.push_back({p.at("f0").get<int>(), p.at("l0").get<int>(), p.at("fw").get<int>(),
                     p.at("lw").get<int>()});
  }
  auto out = stft.synthesize(apply_mask_rects(stft.analyze(padded), rects));
  out.samples.resize(original_len);
  return out;
}

}  // namespace

ComposeResult compose_chain(const dsp::AudioBuffer& clean, const DegradationChain& chain,
                            NoiseSource& noise_source, const dsp::StftConfig& stft_cfg) {
  dsp::AudioBuffer cur = clean;
  json prov;
  prov["version"] = 1;
  prov["seed"] = chain.rng_seed;
  prov["sample_rate"] = clean.sample_rate;
  prov["ops"] = json::array();
  for (size_t i = 0; i < chain.ops.size(); ++i) {
    const auto& op = chain.ops[i];
    op.validate();
    const uint64_t op_seed = util::mix_seed(chain.rng_seed, i, 0x6f70ULL);
    json prov_op = op.to_json();
    switch (op.kind) {
      case DegradationKind::kAdditiveNoise: {
        json desc;
        auto noise = noise_source.draw(cur.samples.size(), cur.sample_rate, op_seed, &desc);
        double gain = 0.0;
        cur = apply_noise(cur, noise, op.snr_db, &gain);
        prov_op["noise_descriptor"] = desc;
        prov_op["applied_gain"] = gain;
        break;
      }
      case DegradationKind::kReverb:
        cur = apply_reverb(cur, op.t60_s, op_seed, op.direct_ratio);
        prov_op["rir_seed"] = op_seed;
        break;
      case DegradationKind::kBandlimit:
        cur = apply_bandlimit(cur, op.cutoff_hz, op.order, op.filter_type);
        break;
      case DegradationKind::kClip:
        cur = apply_clip(cur, op.threshold, op.hard);
        break;
      case DegradationKind::kCodecProxy:
        cur = apply_codec_proxy(cur, op.bit_depth, op.decimation);
        break;
      case DegradationKind::kTfMask:
        cur = mask_via_stft(cur, op, op_seed, stft_cfg, prov_op);
        break;
      case DegradationKind::kLevelShift:
        cur = apply_level_shift(cur, op.gain_db);
        break;
    }
    prov["ops"].push_back(std::move(prov_op));
  }
  return {std::move(cur), std::move(prov)};
}

dsp::AudioBuffer apply_provenance(const dsp::AudioBuffer& clean, const json& provenance,
                                  const dsp::StftConfig& stft_cfg) {
  dsp::AudioBuffer cur = clean;
  for (const auto& prov_op : provenance.at("ops")) {
    const auto op = DegradationSpec::from_json(prov_op);
    switch (op.kind) {
      case DegradationKind::kAdditiveNoise: {
        auto noise = noise_from_descriptor(prov_op.at("noise_descriptor"), cur.samples.size(),
                                           cur.sample_rate);
        cur = apply_noise(cur, noise, op.snr_db);
        break;
      }
      case DegradationKind::kReverb:
        cur = apply_reverb(cur, op.t60_s, prov_op.at("rir_seed").get<uint64_t>(),
                           op.direct_ratio);
        break;
      case DegradationKind::kBandlimit:
        cur = apply_bandlimit(cur, op.cutoff_hz, op.order, op.filter_type);
        break;
      case DegradationKind::kClip:
        cur = apply_clip(cur, op.threshold, op.hard);
        break;
      case DegradationKind::kCodecProxy:
        cur = apply_codec_proxy(cur, op.bit_depth, op.decimation);
        break;
      case DegradationKind::kTfMask:
        cur = replay_mask(cur, prov_op, stft_cfg);
        break;
      case DegradationKind::kLevelShift:
        cur = apply_level_shift(cur, op.gain_db);
        break;
    }
  }
  return cur;
}

DegradationChain sample_chain(const ChainSamplerConfig& cfg, uint64_t seed) {
  util::Rng rng(seed, 0x636861696eULL);
  DegradationChain chain;
  chain.rng_seed = util::mix_seed(seed, 0x7265616cULL);
  std::vector<DegradationKind> pool = cfg.kinds;
  // Fisher-Yates; the resulting prefix is both the selection and the order.
  for (size_t i = pool.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
    std::swap(pool[i - 1], pool[j]);
  }
  const int want = static_cast<int>(rng.uniform_int(cfg.min_ops, cfg.max_ops));
  const int count = std::min<int>(want, static_cast<int>(pool.size()));
  for (int i = 0; i < count; ++i) {
    DegradationSpec op;
    op.kind = pool[i];
    switch (op.kind) {
      case DegradationKind::kAdditiveNoise:
        op.snr_db = rng.uniform(cfg.snr_db_lo, cfg.snr_db_hi);
        op.noise_kind = "any";
        break;
      case DegradationKind::kReverb:
        op.t60_s = rng.uniform(cfg.t60_lo, cfg.t60_hi);
        break;
      case DegradationKind::kBandlimit:
        if (rng.uniform() < 0.7) {
          op.filter_type = FilterType::kLowpass;
          op.cutoff_hz = rng.uniform(cfg.lowpass_lo, cfg.lowpass_hi);
        } else {
          op.filter_type = FilterType::kHighpass;
          op.cutoff_hz = rng.uniform(cfg.highpass_lo, cfg.highpass_hi);
        }
        op.order = static_cast<int>(rng.uniform_int(2, 8));
        break;
      case DegradationKind::kClip:
        op.threshold = rng.uniform(cfg.clip_lo, cfg.clip_hi);
        op.hard = rng.uniform() < 0.5;
        break;
      case DegradationKind::kCodecProxy:
        op.bit_depth = static_cast<int>(rng.uniform_int(6, 12));
        op.decimation = rng.uniform() < 0.5 ? 1 : 2;
        break;
      case DegradationKind::kTfMask:
        op.patch_count = static_cast<int>(rng.uniform_int(1, 5));
        op.max_f = 24;
        op.max_l = 16;
        break;
      case DegradationKind::kLevelShift:
        op.gain_db = rng.uniform(cfg.level_lo, cfg.level_hi);
        break;
    }
    chain.ops.push_back(op);
  }
  return chain;
}

}  // namespace flowsr::degrade
