#include "flowsr/degrade/noise_source.hpp"

#include <algorithm>
#include <filesystem>

#include "flowsr/dsp/wav_io.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::degrade {

dsp::AudioBuffer colored_noise(const std::string& kind, size_t len, int sample_rate,
                               uint64_t seed) {
  util::Rng rng(seed, 0x636c72ULL);
  std::vector<double> s(len);
  if (kind == "white") {
    for (auto& v : s) v = rng.gaussian();
  } else if (kind == "pink") {
    // Paul Kellet's economy pink filter over white noise.
    double b0 = 0, b1 = 0, b2 = 0;
    for (auto& v : s) {
      const double w = rng.gaussian();
      b0 = 0.99765 * b0 + w * 0.0990460;
      b1 = 0.96300 * b1 + w * 0.2965164;
      b2 = 0.57000 * b2 + w * 1.0526913;
      v = b0 + b1 + b2 + w * 0.1848;
    }
  } else if (kind == "brown") {
    double acc = 0.0;
    for (auto& v : s) {
      acc = 0.995 * acc + rng.gaussian();
      v = acc;
    }
  } else {
    throw ConfigError("unknown noise kind: " + kind);
  }
  const double level = dsp::rms(s);
  if (level > 0.0) {
    for (auto& v : s) v /= level;
  }
  return dsp::AudioBuffer(std::move(s), sample_rate);
}

dsp::AudioBuffer ColoredNoiseSource::draw(size_t len, int sample_rate, uint64_t seed,
                                          nlohmann::json* descriptor) {
  std::string kind = kind_;
  if (kind == "any") {
    static const char* kKinds[] = {"white", "pink", "brown"};
    util::Rng rng(seed, 0x6b696e64ULL);
    kind = kKinds[rng.uniform_int(0, 2)];
  }
  if (descriptor) {
    *descriptor = {{"source", "colored"}, {"noise_kind", kind}, {"noise_seed", seed}};
  }
  return colored_noise(kind, len, sample_rate, seed);
}

WavDirNoiseSource::WavDirNoiseSource(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("noise directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".wav") files_.push_back(entry.path().string());
  }
  std::sort(files_.begin(), files_.end());
  if (files_.empty()) throw DataError("no .wav files in noise directory: " + dir);
}

dsp::AudioBuffer WavDirNoiseSource::draw(size_t len, int sample_rate, uint64_t seed,
                                         nlohmann::json* descriptor) {
  util::Rng rng(seed, 0x776176ULL);
  const size_t idx = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(files_.size()) - 1));
  auto audio = dsp::read_wav(files_[idx]);
  if (audio.sample_rate != sample_rate) {
    throw DataError("noise file sample rate mismatch (no resampling): " + files_[idx]);
  }
  const size_t offset =
      audio.samples.empty() ? 0 : static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(audio.samples.size()) - 1));
  std::vector<double> s(len);
  for (size_t i = 0; i < len; ++i) s[i] = audio.samples[(offset + i) % audio.samples.size()];
  if (descriptor) {
    *descriptor = {{"source", "wav"},
                   {"path", files_[idx]},
                   {"offset", offset},
                   {"noise_seed", seed}};
  }
  return dsp::AudioBuffer(std::move(s), sample_rate);
}

dsp::AudioBuffer noise_from_descriptor(const nlohmann::json& descriptor, size_t len,
                                       int sample_rate) {
  const std::string source = descriptor.at("source").get<std::string>();
  if (source == "colored") {
    return colored_noise(descriptor.at("noise_kind").get<std::string>(), len, sample_rate,
                         descriptor.at("noise_seed").get<uint64_t>());
  }
  if (source == "wav") {
    auto audio = dsp::read_wav(descriptor.at("path").get<std::string>());
    if (audio.sample_rate != sample_rate) {
      throw DataError("noise file sample rate changed since provenance was recorded");
    }
    const size_t offset = descriptor.at("offset").get<size_t>();
    std::vector<double> s(len);
    for (size_t i = 0; i < len; ++i) s[i] = audio.samples[(offset + i) % audio.samples.size()];
    return dsp::AudioBuffer(std::move(s), sample_rate);
  }
  throw DataError("unknown noise descriptor source: " + source);
}

}  // namespace flowsr::degrade
