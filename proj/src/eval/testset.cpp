#include "flowsr/eval/testset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowsr/dsp/wav_io.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/kv_config.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::eval {

std::vector<TestClip> make_toy_testset(const TestsetConfig& cfg) {
  train::PseudoSpeechSource speech;
  degrade::ColoredNoiseSource noise("any");
  std::vector<TestClip> clips;
  for (int i = 0; i < cfg.num_clips; ++i) {
    const uint64_t clip_seed = util::mix_seed(cfg.seed, static_cast<uint64_t>(i), 0x74657374ULL);
    TestClip clip;
    clip.index = i;
    auto raw = speech.draw(cfg.clip_seconds, cfg.sample_rate, util::mix_seed(clip_seed, 1));
    clip.clean = dsp::rms_normalize(raw, cfg.target_dbfs).first;

    degrade::DegradationChain chain;
    if (cfg.fixed_snr_db.has_value()) {
      chain.rng_seed = util::mix_seed(clip_seed, 2);
      degrade::DegradationSpec op;
      op.kind = degrade::DegradationKind::kAdditiveNoise;
      op.snr_db = *cfg.fixed_snr_db;
      chain.ops.push_back(op);
    } else {
      chain = degrade::sample_chain(cfg.chains, util::mix_seed(clip_seed, 3));
    }
    auto composed = degrade::compose_chain(clip.clean, chain, noise, cfg.stft);
    clip.noisy = std::move(composed.noisy);
    clip.provenance = std::move(composed.provenance);
    std::string tag;
    for (const auto& op : chain.ops) {
      if (!tag.empty()) tag += "+";
      tag += degrade::to_string(op.kind);
    }
    clip.degradation_tag = tag.empty() ? "none" : tag;
    clips.push_back(std::move(clip));
  }
  return clips;
}

std::string write_testset(const std::string& dir, const std::vector<TestClip>& clips) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string manifest_path = (fs::path(dir) / "manifest.csv").string();
  std::ofstream manifest(manifest_path);
  if (!manifest) throw DataError("cannot write manifest: " + manifest_path);
  manifest << "clean,noisy,provenance\n";
  for (const auto& clip : clips) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%03d", clip.index);
    const std::string clean_path = (fs::path(dir) / ("clean_" + std::string(suffix) + ".wav")).string();
    const std::string noisy_path = (fs::path(dir) / ("noisy_" + std::string(suffix) + ".wav")).string();
    const std::string prov_path = (fs::path(dir) / ("prov_" + std::string(suffix) + ".json")).string();
    dsp::write_wav(clean_path, clip.clean);
    dsp::write_wav(noisy_path, clip.noisy);
    std::ofstream prov(prov_path);
    prov << clip.provenance.dump(2) << "\n";
    manifest << clean_path << "," << noisy_path << "," << prov_path << "\n";
  }
  return manifest_path;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  bool first = true;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = util::split(line, ',');
    if (first) {
      header = fields;
      first = false;
      continue;
    }
    ManifestEntry e;
    for (size_t i = 0; i < fields.size() && i < header.size(); ++i) {
      if (header[i] == "clean") e.clean = fields[i];
      else if (header[i] == "noisy") e.noisy = fields[i];
      else if (header[i] == "provenance") e.provenance = fields[i];
      else if (header[i] == "enhanced") e.enhanced = fields[i];
    }
    if (e.clean.empty() || e.noisy.empty()) {
      throw DataError("manifest rows need at least clean and noisy columns: " + path);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace flowsr::eval
