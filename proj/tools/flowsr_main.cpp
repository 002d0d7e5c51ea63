#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "flowsr/dsp/wav_io.hpp"
#include "flowsr/eval/sweep.hpp"
#include "flowsr/models/complexity.hpp"
#include "flowsr/stream/stream_engine.hpp"
#include "flowsr/train/trainer.hpp"
#include "flowsr/util/error.hpp"

namespace fs = std::filesystem;
using namespace flowsr;

namespace {

struct ReferenceComplexity {
  const char* preset;
  double params_m;
  double gmacs_per_s;
  double rf_s;
};

// Reference figures the named presets are checked against; deviations are
// printed, never hidden.
constexpr ReferenceComplexity kReference[] = {
    {"convglu-base", 6.02, 0.36, 0.75},
    {"convglu-large", 57.6, 3.5, 0.75},
};

util::KvConfig load_config_with_overrides(const std::string& path,
                                          const std::vector<std::string>& overrides) {
  util::KvConfig kv = path.empty() ? util::KvConfig{} : util::KvConfig::from_file(path);
  for (const auto& o : overrides) kv.apply_override(o);
  return kv;
}

void echo_config(const util::KvConfig& kv, const std::string& save_path = {}) {
  std::cout << "# effective configuration\n" << kv.to_string();
  if (!save_path.empty()) kv.save(save_path);
}

nn::CheckpointData load_ckpt(const std::string& path) { return nn::load_checkpoint(path); }

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& resume_path) {
  auto kv = load_config_with_overrides(config_path, overrides);
  auto cfg = train::TrainConfig::from_config(kv);
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const std::string ckpt_path = (fs::path(cfg.out_dir) / "checkpoint.fsr").string();
  const std::string loss_path = (fs::path(cfg.out_dir) / "loss.csv").string();
  echo_config(cfg.to_config(), (fs::path(cfg.out_dir) / "effective_config.txt").string());

  train::Trainer trainer(cfg);
  if (!resume_path.empty()) {
    trainer.resume_from(resume_path);
    std::cout << "resumed at step " << trainer.completed_steps() << "\n";
  }
  std::ofstream loss_csv(loss_path, resume_path.empty() ? std::ios::trunc : std::ios::app);
  if (!loss_csv) throw DataError("cannot write loss log: " + loss_path);
  if (resume_path.empty()) loss_csv << "step,loss,grad_norm,wall_time\n";
  double total_wall = 0.0;
  trainer.run(
      [&](const train::StepLog& log) {
        total_wall += log.wall_time_s;
        loss_csv << log.step << "," << util::format_double(log.loss) << ","
                 << util::format_double(log.grad_norm) << ","
                 << util::format_double(log.wall_time_s) << "\n";
        if (log.step % 100 == 0) {
          std::cout << "step " << log.step << " loss " << log.loss << " grad_norm "
                    << log.grad_norm << "\n";
        }
      },
      ckpt_path);
  std::cout << "trained " << trainer.completed_steps() << " steps in " << total_wall
            << " s\ncheckpoint: " << ckpt_path << "\nloss log: " << loss_path << "\n";
  return 0;
}

int cmd_enhance(const std::string& in_path, const std::string& out_path,
                const std::string& ckpt_path, int nfe, const std::string& scheme,
                uint64_t seed, bool no_normalize, const std::string& log_path) {
  const auto data = load_ckpt(ckpt_path);
  auto model = train::backbone_from_checkpoint(data);

  fm::RestoreOptions opt;
  opt.stft = fm::decode_stft(data.config);
  opt.compression = fm::decode_compression(data.config);
  opt.flow = fm::decode_flow(data.config);
  opt.sampler.nfe = nfe;
  opt.sampler.scheme = fm::scheme_from_string(scheme);
  opt.seed = seed;
  opt.normalize_input = !no_normalize;
  opt.target_dbfs = data.config.get_double_or("train.target_dbfs", -25.0);

  const auto noisy = dsp::read_wav(in_path);
  if (noisy.sample_rate != opt.stft.sample_rate) {
    throw DataError("input sample rate " + std::to_string(noisy.sample_rate) +
                    " does not match the model's " + std::to_string(opt.stft.sample_rate));
  }
  int64_t evals = 0;
  const auto enhanced = fm::restore(noisy, model->velocity_field(), opt, &evals);
  dsp::write_wav(out_path, enhanced);

  util::KvConfig echo;
  fm::encode_stft(echo, opt.stft);
  fm::encode_compression(echo, opt.compression);
  fm::encode_flow(echo, opt.flow);
  fm::encode_sampler(echo, opt.sampler);
  echo.set("enhance.seed", static_cast<int64_t>(seed));
  echo.set("enhance.normalize_input", opt.normalize_input);
  echo.set("enhance.nfe_evaluations", evals);
  echo.set("enhance.input", in_path);
  echo.set("enhance.output", out_path);
  echo_config(echo, log_path);
  return 0;
}

dsp::AudioBuffer read_stream_input(const std::string& path, int rate) {
  if (path != "-") return dsp::read_wav(path);
  // raw float32 little-endian PCM on stdin at the declared rate
  std::vector<double> samples;
  float buf[4096];
  size_t got;
  while ((got = std::fread(buf, sizeof(float), 4096, stdin)) > 0) {
    for (size_t i = 0; i < got; ++i) samples.push_back(buf[i]);
  }
  return dsp::AudioBuffer(std::move(samples), rate);
}

void write_stream_output(const std::string& path, const dsp::AudioBuffer& audio) {
  if (path != "-") {
    dsp::write_wav(path, audio);
    return;
  }
  for (double v : audio.samples) {
    const float f = static_cast<float>(v);
    std::fwrite(&f, sizeof(float), 1, stdout);
  }
  std::fflush(stdout);
}

int cmd_stream(const std::string& in_path, const std::string& out_path,
               const std::string& ckpt_path, int nfe, const std::string& scheme, uint64_t seed,
               int chunk, double gain_db, bool report, double bench_seconds) {
  const auto data = load_ckpt(ckpt_path);
  auto model = train::backbone_from_checkpoint(data);

  stream::StreamConfig cfg;
  cfg.stft = fm::decode_stft(data.config);
  cfg.compression = fm::decode_compression(data.config);
  cfg.flow = fm::decode_flow(data.config);
  cfg.sampler.nfe = nfe;
  cfg.sampler.scheme = fm::scheme_from_string(scheme);
  cfg.seed = seed;
  cfg.input_gain = std::pow(10.0, gain_db / 20.0);

  if (report) {
    std::cout << stream::measure_latency(*model, cfg, bench_seconds).to_string();
  }
  if (in_path.empty()) {
    if (!report) throw ConfigError("stream: need --in, or --report for a benchmark run");
    return 0;
  }
  const auto noisy = read_stream_input(in_path, cfg.stft.sample_rate);
  if (noisy.sample_rate != cfg.stft.sample_rate) {
    throw DataError("input sample rate does not match the model");
  }
  stream::StreamSession session(*model, cfg);
  std::vector<double> out;
  const size_t step = chunk > 0 ? static_cast<size_t>(chunk) : cfg.stft.hop_len;
  for (size_t pos = 0; pos < noisy.samples.size(); pos += step) {
    const size_t n = std::min(step, noisy.samples.size() - pos);
    auto part = session.push(noisy.samples.data() + pos, n);
    out.insert(out.end(), part.begin(), part.end());
  }
  auto tail = session.flush();
  out.insert(out.end(), tail.begin(), tail.end());
  write_stream_output(out_path, dsp::AudioBuffer(std::move(out), cfg.stft.sample_rate));
  std::cerr << "frames: " << session.frames_processed() << "\n";
  return 0;
}

std::vector<eval::TestClip> clips_from_manifest(const std::string& manifest_path) {
  std::vector<eval::TestClip> clips;
  int index = 0;
  for (const auto& entry : eval::read_manifest(manifest_path)) {
    eval::TestClip clip;
    clip.index = index++;
    clip.clean = dsp::read_wav(entry.clean);
    clip.noisy = dsp::read_wav(entry.noisy);
    if (!entry.provenance.empty()) {
      std::ifstream in(entry.provenance);
      if (!in) throw DataError("cannot open provenance: " + entry.provenance);
      nlohmann::json prov;
      in >> prov;
      clip.provenance = prov;
      std::string tag;
      for (const auto& op : prov.at("ops")) {
        if (!tag.empty()) tag += "+";
        tag += op.at("kind").get<std::string>();
      }
      clip.degradation_tag = tag.empty() ? "none" : tag;
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

int cmd_sweep(const std::string& ckpt_path, const std::string& manifest_path, int toy_clips,
              double toy_seconds, double toy_snr, bool toy_random_chains,
              const std::string& nfe_list, const std::string& scheme, uint64_t seed, int jobs,
              const std::string& out_csv, const std::string& timing_csv,
              const std::string& breakdown_axis, const std::string& breakdown_csv_path) {
  const auto data = load_ckpt(ckpt_path);
  auto model = train::backbone_from_checkpoint(data);

  eval::SweepConfig cfg;
  cfg.stft = fm::decode_stft(data.config);
  cfg.compression = fm::decode_compression(data.config);
  cfg.flow = fm::decode_flow(data.config);
  cfg.scheme = fm::scheme_from_string(scheme);
  cfg.seed = seed;
  cfg.jobs = jobs;
  cfg.nfe_list.clear();
  for (const auto& part : util::split(nfe_list, ',')) {
    if (!part.empty()) cfg.nfe_list.push_back(std::stoi(part));
  }
  if (cfg.nfe_list.empty()) throw ConfigError("sweep: empty nfe list");

  std::vector<eval::TestClip> clips;
  if (!manifest_path.empty()) {
    clips = clips_from_manifest(manifest_path);
  } else {
    eval::TestsetConfig tc;
    tc.num_clips = toy_clips;
    tc.clip_seconds = toy_seconds;
    tc.seed = util::mix_seed(seed, 0x746f79ULL);
    tc.sample_rate = cfg.stft.sample_rate;
    tc.stft = cfg.stft;
    if (!toy_random_chains) tc.fixed_snr_db = toy_snr;
    clips = make_toy_testset(tc);
  }
  if (clips.empty()) throw DataError("sweep: no clips to evaluate");

  util::KvConfig echo;
  fm::encode_stft(echo, cfg.stft);
  fm::encode_compression(echo, cfg.compression);
  fm::encode_flow(echo, cfg.flow);
  echo.set("sweep.nfe_list", nfe_list);
  echo.set("sweep.scheme", scheme);
  echo.set("sweep.seed", static_cast<int64_t>(seed));
  echo.set("sweep.clips", static_cast<int64_t>(clips.size()));
  echo.set("sweep.source", manifest_path.empty() ? "toy" : manifest_path);
  echo_config(echo);

  const auto result = eval::nfe_sweep(*model, clips, cfg);
  {
    std::ofstream out(out_csv);
    if (!out) throw DataError("cannot write sweep csv: " + out_csv);
    out << result.to_csv();
  }
  if (!timing_csv.empty()) {
    std::ofstream out(timing_csv);
    out << result.timing_csv();
  }
  for (const auto& agg : result.aggregates()) {
    std::cout << "nfe " << agg.nfe << ": mean si-sdr " << agg.mean_si_sdr_out
              << " dB, mean improvement " << agg.mean_si_sdr_improvement << " dB over "
              << agg.clips << " clips\n";
  }
  if (!breakdown_axis.empty()) {
    const auto axis = breakdown_axis == "quality" ? eval::BreakdownAxis::kInputQualityBin
                      : breakdown_axis == "degradation"
                          ? eval::BreakdownAxis::kDegradationKind
                          : throw ConfigError("breakdown axis must be quality or degradation");
    const auto rows = eval::breakdown_report(result, axis);
    const std::string csv = eval::breakdown_csv(rows);
    if (!breakdown_csv_path.empty()) {
      std::ofstream out(breakdown_csv_path);
      out << csv;
    } else {
      std::cout << csv;
    }
  }
  return 0;
}

int cmd_degrade(const std::string& in_path, const std::string& out_path,
                const std::string& chain_path, const std::string& replay_path,
                uint64_t seed_override, bool has_seed, const std::string& provenance_out,
                const std::string& noise_dir) {
  const auto clean = dsp::read_wav(in_path);
  std::unique_ptr<degrade::NoiseSource> source;
  if (noise_dir.empty()) {
    source = std::make_unique<degrade::ColoredNoiseSource>("any");
  } else {
    source = std::make_unique<degrade::WavDirNoiseSource>(noise_dir);
  }

  if (!replay_path.empty()) {
    std::ifstream in(replay_path);
    if (!in) throw DataError("cannot open provenance: " + replay_path);
    nlohmann::json prov;
    in >> prov;
    const auto noisy = degrade::apply_provenance(clean, prov);
    dsp::write_wav(out_path, noisy);
    std::cout << "replayed " << prov.at("ops").size() << " ops\n";
    return 0;
  }

  auto chain = degrade::DegradationChain::load(chain_path);
  if (has_seed) chain.rng_seed = seed_override;
  auto result = degrade::compose_chain(clean, chain, *source);
  dsp::write_wav(out_path, result.noisy);
  if (!provenance_out.empty()) {
    std::ofstream out(provenance_out);
    if (!out) throw DataError("cannot write provenance: " + provenance_out);
    out << result.provenance.dump(2) << "\n";
  }
  std::cout << "applied " << chain.ops.size() << " ops\n";
  return 0;
}

int cmd_complexity(const std::string& preset, const std::string& ckpt_path) {
  dsp::StftConfig stft;
  std::unique_ptr<models::Backbone> model;
  if (!ckpt_path.empty()) {
    const auto data = load_ckpt(ckpt_path);
    stft = fm::decode_stft(data.config);
    model = train::backbone_from_checkpoint(data);
  } else {
    if (!models::is_preset(preset)) throw ConfigError("unknown backbone preset: " + preset);
    model = models::build_preset(preset, stft.bins());
  }
  const auto report = models::count_complexity(model->layer_infos(), stft);
  std::cout << "model: " << (ckpt_path.empty() ? preset : ckpt_path) << "\n"
            << report.to_string();
  for (const auto& ref : kReference) {
    if (preset == ref.preset) {
      const double params_m = report.params / 1e6;
      const double gmacs = report.macs_per_second / 1e9;
      std::cout << "reference comparison (" << ref.preset << "):\n";
      std::cout << "  params_m: counted " << params_m << " vs reference " << ref.params_m
                << " (deviation " << (params_m - ref.params_m) << ")\n";
      std::cout << "  gmacs_per_s: counted " << gmacs << " vs reference " << ref.gmacs_per_s
                << " (deviation " << (gmacs - ref.gmacs_per_s) << ")\n";
      std::cout << "  rf_s: counted " << report.receptive_field_seconds << " vs reference "
                << ref.rf_s << " (deviation "
                << (report.receptive_field_seconds - ref.rf_s) << ")\n";
    }
  }
  return 0;
}

int cmd_eval(const std::string& manifest_path, const std::string& out_csv,
             const std::string& stft_overrides) {
  dsp::StftConfig stft;
  if (!stft_overrides.empty()) {
    util::KvConfig kv;
    for (const auto& o : util::split(stft_overrides, ';')) kv.apply_override(o);
    stft = fm::decode_stft(kv);
  }
  const auto entries = eval::read_manifest(manifest_path);
  std::ostringstream csv;
  csv << "clip,si_sdr_in,si_sdr_enh,si_sdr_improvement,lsd_in,lsd_enh,sc_in,sc_enh\n";
  double mean_improvement = 0.0;
  int count = 0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.enhanced.empty()) {
      throw DataError("eval manifest needs an 'enhanced' column on every row");
    }
    const auto clean = dsp::read_wav(e.clean);
    const auto noisy = dsp::read_wav(e.noisy);
    const auto enhanced = dsp::read_wav(e.enhanced);
    const auto in_m = eval::compute_metrics(clean, noisy, stft);
    const auto enh_m = eval::compute_metrics(clean, enhanced, stft);
    csv << i << "," << util::format_double(in_m.si_sdr) << ","
        << util::format_double(enh_m.si_sdr) << ","
        << util::format_double(enh_m.si_sdr - in_m.si_sdr) << ","
        << util::format_double(in_m.lsd) << "," << util::format_double(enh_m.lsd) << ","
        << util::format_double(in_m.spectral_conv) << ","
        << util::format_double(enh_m.spectral_conv) << "\n";
    mean_improvement += enh_m.si_sdr - in_m.si_sdr;
    ++count;
  }
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw DataError("cannot write metrics csv: " + out_csv);
    out << csv.str();
  } else {
    std::cout << csv.str();
  }
  if (count > 0) {
    std::cout << "mean si-sdr improvement: " << mean_improvement / count << " dB over "
              << count << " clips\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowsr: streaming flow-matching speech restoration"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a backbone on synthetic pairs");
  std::string train_config, resume_path;
  std::vector<std::string> overrides;
  train_cmd->add_option("--config", train_config, "key = value config file");
  train_cmd->add_option("--set", overrides, "override, key=value (repeatable)");
  train_cmd->add_option("--resume", resume_path, "checkpoint to resume from");

  // enhance
  auto* enhance_cmd = app.add_subcommand("enhance", "offline enhancement of a wav file");
  std::string in_path, out_path, ckpt_path, log_path;
  int nfe = 5;
  std::string scheme = "euler";
  uint64_t seed = 0;
  bool no_normalize = false;
  enhance_cmd->add_option("--in", in_path, "input wav")->required();
  enhance_cmd->add_option("--out", out_path, "output wav")->required();
  enhance_cmd->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  enhance_cmd->add_option("--nfe", nfe, "velocity-field evaluations");
  enhance_cmd->add_option("--scheme", scheme, "euler|midpoint");
  enhance_cmd->add_option("--seed", seed, "base-noise seed");
  enhance_cmd->add_flag("--no-normalize", no_normalize, "skip input level normalization");
  enhance_cmd->add_option("--log", log_path, "write the effective-config echo here");

  // stream
  auto* stream_cmd = app.add_subcommand("stream", "frame-synchronous streaming enhancement");
  std::string s_in, s_out, s_ckpt;
  int s_nfe = 5, chunk = 0;
  std::string s_scheme = "euler";
  uint64_t s_seed = 0;
  double gain_db = 0.0, bench_seconds = 10.0;
  bool report = false;
  stream_cmd->add_option("--in", s_in, "input wav, or '-' for raw f32le pcm on stdin");
  stream_cmd->add_option("--out", s_out, "output wav, or '-' for raw f32le pcm on stdout");
  stream_cmd->add_option("--checkpoint", s_ckpt, "model checkpoint")->required();
  stream_cmd->add_option("--nfe", s_nfe, "velocity-field evaluations per frame");
  stream_cmd->add_option("--scheme", s_scheme, "euler|midpoint");
  stream_cmd->add_option("--seed", s_seed, "base-noise seed");
  stream_cmd->add_option("--chunk", chunk, "push size in samples (default: one hop)");
  stream_cmd->add_option("--gain-db", gain_db, "fixed input gain");
  stream_cmd->add_flag("--report", report, "print a latency/rtf report");
  stream_cmd->add_option("--bench-seconds", bench_seconds, "benchmark length for --report");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "metrics across an nfe grid");
  std::string sw_ckpt, sw_manifest, sw_nfe_list = "1,2,5,10,20", sw_scheme = "euler";
  std::string sw_out = "sweep.csv", sw_timing, sw_breakdown, sw_breakdown_out;
  int toy_clips = 20, sw_jobs = 1;
  double toy_seconds = 2.0, toy_snr = 5.0;
  bool toy_random_chains = false;
  uint64_t sw_seed = 0;
  sweep_cmd->add_option("--checkpoint", sw_ckpt, "model checkpoint")->required();
  sweep_cmd->add_option("--manifest", sw_manifest, "clean,noisy[,provenance] manifest csv");
  sweep_cmd->add_option("--toy", toy_clips, "generate this many synthetic clips instead");
  sweep_cmd->add_option("--toy-seconds", toy_seconds, "synthetic clip length");
  sweep_cmd->add_option("--snr", toy_snr, "fixed additive-noise snr for synthetic clips");
  sweep_cmd->add_flag("--random-chains", toy_random_chains,
                      "randomized degradation chains for synthetic clips");
  sweep_cmd->add_option("--nfe-list", sw_nfe_list, "comma-separated nfe grid");
  sweep_cmd->add_option("--scheme", sw_scheme, "euler|midpoint");
  sweep_cmd->add_option("--seed", sw_seed, "sweep seed (per-clip draws derive from it)");
  sweep_cmd->add_option("--jobs", sw_jobs, "clip-level parallelism");
  sweep_cmd->add_option("--out", sw_out, "sweep csv path");
  sweep_cmd->add_option("--timing-out", sw_timing, "rtf csv path (measured, not replayable)");
  sweep_cmd->add_option("--breakdown", sw_breakdown, "quality|degradation");
  sweep_cmd->add_option("--breakdown-out", sw_breakdown_out, "breakdown csv path");

  // degrade
  auto* degrade_cmd = app.add_subcommand("degrade", "apply a degradation chain to a wav");
  std::string d_in, d_out, d_chain, d_replay, d_prov, d_noise_dir;
  uint64_t d_seed = 0;
  degrade_cmd->add_option("--in", d_in, "input wav")->required();
  degrade_cmd->add_option("--out", d_out, "output wav")->required();
  degrade_cmd->add_option("--chain", d_chain, "chain json");
  degrade_cmd->add_option("--replay", d_replay, "provenance json to replay bit-exactly");
  auto* d_seed_opt = degrade_cmd->add_option("--seed", d_seed, "override the chain seed");
  degrade_cmd->add_option("--provenance", d_prov, "write realized parameters here");
  degrade_cmd->add_option("--noise-dir", d_noise_dir, "wav directory noise source");

  // complexity
  auto* complexity_cmd = app.add_subcommand("complexity", "parameter/mac/rf accounting");
  std::string c_preset, c_ckpt;
  complexity_cmd->add_option("--preset", c_preset,
                             "convglu-toy|convglu-base|convglu-large|freq-unet-lite");
  complexity_cmd->add_option("--checkpoint", c_ckpt, "count a trained model instead");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "intrusive metrics over a manifest");
  std::string e_manifest, e_out, e_stft;
  eval_cmd->add_option("--manifest", e_manifest, "clean,noisy,enhanced manifest csv")
      ->required();
  eval_cmd->add_option("--out", e_out, "metrics csv path (default: stdout)");
  eval_cmd->add_option("--stft", e_stft, "overrides, e.g. stft.window_len=512;stft.hop_len=256");

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) return cmd_train(train_config, overrides, resume_path);
    if (enhance_cmd->parsed()) {
      return cmd_enhance(in_path, out_path, ckpt_path, nfe, scheme, seed, no_normalize,
                         log_path);
    }
    if (stream_cmd->parsed()) {
      return cmd_stream(s_in, s_out, s_ckpt, s_nfe, s_scheme, s_seed, chunk, gain_db, report,
                        bench_seconds);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sw_ckpt, sw_manifest, toy_clips, toy_seconds, toy_snr,
                       toy_random_chains, sw_nfe_list, sw_scheme, sw_seed, sw_jobs, sw_out,
                       sw_timing, sw_breakdown, sw_breakdown_out);
    }
    if (degrade_cmd->parsed()) {
      if (d_chain.empty() && d_replay.empty()) {
        throw ConfigError("degrade: need --chain or --replay");
      }
      return cmd_degrade(d_in, d_out, d_chain, d_replay, d_seed, d_seed_opt->count() > 0,
                         d_prov, d_noise_dir);
    }
    if (complexity_cmd->parsed()) {
      if (c_preset.empty() && c_ckpt.empty()) {
        throw ConfigError("complexity: need --preset or --checkpoint");
      }
      return cmd_complexity(c_preset, c_ckpt);
    }
    if (eval_cmd->parsed()) return cmd_eval(e_manifest, e_out, e_stft);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
