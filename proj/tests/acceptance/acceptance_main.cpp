// Acceptance suite: runs every shipping criterion end to end and prints one
// pass/fail line per criterion. Exit code is the number of failed criteria.
//
//   flowsr_acceptance [--criteria 1,2,...] [--train-steps N] [--work-dir D]
//
// The toy model trained for criterion 8 is cached in the work dir and reused
// by criteria 6 and 9-11 (and by later invocations with the same settings).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "flowsr/dsp/wav_io.hpp"
#include "flowsr/eval/sweep.hpp"
#include "flowsr/models/causal_freq_unet.hpp"
#include "flowsr/models/complexity.hpp"
#include "flowsr/models/convglu_unet.hpp"
#include "flowsr/stream/stream_engine.hpp"
#include "flowsr/train/trainer.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

using namespace flowsr;
namespace fs = std::filesystem;

namespace {

struct Context {
  fs::path work_dir = "acceptance_work";
  int64_t train_steps = 5000;
  std::string toy_checkpoint;  // filled by ensure_trained_model
};

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------------------
// shared toy training run (criterion 8's subject, reused by 6 and 9-11)

train::TrainConfig toy_train_config(int64_t steps) {
  train::TrainConfig cfg;
  cfg.steps = steps;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-3;
  cfg.segment_seconds = 1.0;
  cfg.seed = 0xA11CE;
  cfg.backbone = "convglu-toy";
  cfg.checkpoint_interval = 1000;
  cfg.chains.kinds = {degrade::DegradationKind::kAdditiveNoise};
  cfg.chains.min_ops = 1;
  cfg.chains.max_ops = 1;
  cfg.chains.snr_db_lo = -5.0;
  cfg.chains.snr_db_hi = 30.0;
  // base-distribution scale matched to the compressed-domain signal
  // statistics (coordinate rms ~0.05); a desk-scale model integrates away
  // base noise only down to a fixed fraction, so an oversized sigma_max
  // would leave residual noise above the signal itself
  cfg.flow.sigma_max = 0.15;
  return cfg;
}

std::vector<double> g_loss_curve;  // from the criterion-8 run (or its cache)

void ensure_trained_model(Context& ctx) {
  if (!ctx.toy_checkpoint.empty()) return;
  fs::create_directories(ctx.work_dir);
  const std::string ckpt = (ctx.work_dir / "toy_model.fsr").string();
  const std::string loss_path = (ctx.work_dir / "toy_loss.csv").string();
  const auto cfg = toy_train_config(ctx.train_steps);

  bool reuse = false;
  if (fs::exists(ckpt) && fs::exists(loss_path)) {
    try {
      const auto data = nn::load_checkpoint(ckpt);
      reuse = data.config.get_int_or("train.steps", -1) == cfg.steps &&
              data.optimizer_step == static_cast<uint64_t>(cfg.steps) &&
              data.config.get_int_or("train.seed", -1) == static_cast<int64_t>(cfg.seed);
    } catch (const Error&) {
      reuse = false;
    }
  }
  if (reuse) {
    std::cout << "  (reusing cached toy model: " << ckpt << ")\n";
    std::ifstream in(loss_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      const auto fields = util::split(line, ',');
      if (fields.size() >= 2) g_loss_curve.push_back(std::stod(fields[1]));
    }
  } else {
    std::cout << "  (training toy model: " << cfg.steps << " steps, batch "
              << cfg.batch_size << ")\n";
    train::Trainer trainer(cfg);
    std::ofstream loss_csv(loss_path);
    loss_csv << "step,loss\n";
    const double t0 = now_seconds();
    trainer.run([&](const train::StepLog& log) {
      g_loss_curve.push_back(log.loss);
      loss_csv << log.step << "," << util::format_double(log.loss) << "\n";
      if (log.step % 250 == 0) {
        std::cout << "    step " << log.step << " loss " << log.loss << " ("
                  << (now_seconds() - t0) << " s)\n";
      }
    });
    trainer.save(ckpt);
    std::cout << "  (training took " << now_seconds() - t0 << " s)\n";
  }
  ctx.toy_checkpoint = ckpt;
}

std::unique_ptr<models::Backbone> load_toy_model(Context& ctx) {
  ensure_trained_model(ctx);
  return train::backbone_from_checkpoint(nn::load_checkpoint(ctx.toy_checkpoint));
}

eval::TestsetConfig heldout_testset_config(uint64_t seed, int clips, double fixed_snr) {
  eval::TestsetConfig tc;
  tc.num_clips = clips;
  tc.clip_seconds = 2.0;
  tc.seed = seed;
  tc.fixed_snr_db = fixed_snr;
  return tc;
}

// ---------------------------------------------------------------------------
// criteria

bool criterion_1() {
  const double t0 = now_seconds();
  util::Rng rng(0xC1);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double smin = trial % 4 == 0 ? 0.0 : rng.uniform(1e-4, 0.5);
    const double smax = smin + rng.uniform(0.1, 2.0);
    const fm::FlowPathParams p{smin, smax};
    const double t = smin == 0.0 ? rng.uniform(0.0, 0.999) : rng.uniform();
    dsp::ComplexSpectrogram x1(4, 3), z(4, 3);
    for (auto& c : x1.data) c = {rng.gaussian(), rng.gaussian()};
    for (auto& c : z.data) c = {rng.gaussian(), rng.gaussian()};
    const auto xt = fm::sample_xt(x1, fm::FlowTime(t), z, p);
    const auto u = fm::target_field(xt, x1, fm::FlowTime(t), p);
    for (size_t i = 0; i < u.data.size(); ++i) {
      const std::complex<double> expect = x1.data[i] + (smin - smax) * z.data[i];
      worst = std::max(worst, std::abs(u.data[i] - expect) / std::max(1e-9, std::abs(expect)));
    }
  }
  const double elapsed = now_seconds() - t0;
  std::cout << "  worst relative gap " << worst << " over 1000 cases, " << elapsed << " s\n";
  return worst < 1e-12 && elapsed < 1.0;
}

bool criterion_2() {
  const double t0 = now_seconds();
  util::Rng rng(0xC2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double smin = trial % 3 == 0 ? 0.0 : rng.uniform(1e-4, 0.3);
    const double smax = smin + rng.uniform(0.2, 1.5);
    const fm::FlowPathParams p{smin, smax};
    dsp::ComplexSpectrogram x1(3, 2), z(3, 2);
    for (auto& c : x1.data) c = {rng.gaussian(), rng.gaussian()};
    for (auto& c : z.data) c = {rng.gaussian(), rng.gaussian()};
    dsp::ComplexSpectrogram x0(3, 2);
    for (size_t i = 0; i < z.data.size(); ++i) x0.data[i] = smax * z.data[i];
    const auto out = fm::integrate_ode(
        [&](const dsp::ComplexSpectrogram& x, const dsp::ComplexSpectrogram&, double t) {
          return fm::target_field(x, x1, fm::FlowTime(t), p);
        },
        x0, x1, fm::SamplerConfig{1, fm::OdeScheme::kEuler});
    for (size_t i = 0; i < out.data.size(); ++i) {
      const std::complex<double> expect = x1.data[i] + smin * z.data[i];
      worst = std::max(worst, std::abs(out.data[i] - expect));
    }
  }
  const double elapsed = now_seconds() - t0;
  std::cout << "  worst absolute gap " << worst << " over 100 one-step transports, " << elapsed
            << " s\n";
  return worst < 1e-12 && elapsed < 1.0;
}

// Central-difference check of d(loss)/d(theta). A coordinate passes when
// |fd - an| < atol + rtol * max(|fd|, |an|): rtol carries the 1e-4 relative
// requirement, the small atol covers coordinates whose true gradient sits
// below the h^2 truncation noise of the probe itself.
double finite_diff_worst(std::vector<nn::Parameter*> params,
                         const std::function<double()>& loss_fn, int max_coords_per_tensor,
                         uint64_t pick_seed) {
  constexpr double kRtol = 1e-4;
  constexpr double kAtol = 1e-7;
  for (auto* p : params) p->zero_grad();
  loss_fn();  // populates grads (callee runs backward)
  std::vector<nn::Tensor> analytic;
  for (auto* p : params) analytic.push_back(p->grad);

  const double h = 1e-5;
  util::Rng pick(pick_seed);
  double worst = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    nn::Parameter* p = params[pi];
    const int64_t n = p->value.size();
    std::vector<int64_t> coords;
    if (n <= max_coords_per_tensor) {
      for (int64_t i = 0; i < n; ++i) coords.push_back(i);
    } else {
      for (int k = 0; k < max_coords_per_tensor; ++k) {
        coords.push_back(pick.uniform_int(0, n - 1));
      }
    }
    for (int64_t i : coords) {
      const double saved = p->value[i];
      p->value[i] = saved + h;
      const double up = loss_fn();
      p->value[i] = saved - h;
      const double down = loss_fn();
      p->value[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double an = analytic[pi][i];
      const double gap = std::abs(fd - an);
      const double scale = std::max(std::abs(fd), std::abs(an));
      if (gap > kAtol) worst = std::max(worst, gap / std::max(kAtol / kRtol, scale));
    }
  }
  return worst;
}

bool criterion_3() {
  const double t0 = now_seconds();
  double worst = 0.0;

  // every primitive in a composite graph with full-coordinate checks
  {
    util::Rng rng(0xC31);
    nn::CausalConv1d conv("c", 4, 4, 3, 2, 2, rng);
    nn::DepthwiseSeparableConv1d sep("s", 4, 3, 2, 1, rng);
    nn::CumulativeGroupNorm norm("n", 3, 3, 1e-6);
    nn::Conv2dCausal conv2("c2", 2, 3, 3, 2, 1, 1, rng);
    nn::Conv2dCausal down("d", 3, 3, 2, 1, 1, 2, rng);
    nn::FreqUpsample2d up("u", 3, 2, rng);
    nn::CumulativeGroupNorm norm2("n2", 2, 2, 1e-6);
    nn::TimeEmbedMlp mlp("t", 8, 4, 16.0, rng);
    nn::Tensor x1d({4, 6}), x2d({2, 6, 5}), proj1({3, 6}), proj2({2, 6, 5}), proj_mlp({4});
    for (auto* t : {&x1d, &proj1}) {
      for (int64_t i = 0; i < t->size(); ++i) (*t)[i] = rng.gaussian();
    }
    for (auto* t : {&x2d, &proj2}) {
      for (int64_t i = 0; i < t->size(); ++i) (*t)[i] = rng.gaussian();
    }
    for (int64_t i = 0; i < proj_mlp.size(); ++i) proj_mlp[i] = rng.gaussian();

    std::vector<nn::Parameter*> params;
    conv.collect(params);
    sep.collect(params);
    norm.collect(params);
    conv2.collect(params);
    down.collect(params);
    up.collect(params);
    norm2.collect(params);
    mlp.collect(params);

    auto loss_fn = [&]() {
      nn::Tape tape;
      nn::Var a = conv.forward(tape, tape.input(x1d));
      a = sep.forward(tape, tape.tanh_op(a));
      a = norm.forward(tape, tape.silu(a));
      nn::Var l1 = tape.sum(tape.mul(a, tape.input(proj1)));

      nn::Var b = conv2.forward(tape, tape.input(x2d));
      b = down.forward(tape, b);
      b = up.forward(tape, b);
      b = norm2.forward(tape, b);
      nn::Var l2 = tape.mse(b, proj2);

      nn::Var m = mlp.forward(tape, 0.37);
      nn::Var l3 = tape.sum(tape.mul(m, tape.input(proj_mlp)));

      nn::Var loss = tape.add(tape.add(l1, l2), l3);
      tape.backward(loss);
      return tape.val(loss)[0];
    };
    worst = std::max(worst, finite_diff_worst(params, loss_fn, 1 << 20, 0xC32));
  }

  // both toy backbones, random coordinate subsets
  {
    auto run_backbone = [&](models::Backbone& model, uint64_t seed) {
      util::Rng rng(seed);
      const int f2 = 2 * model.bins();
      nn::Tensor xt({f2, 5}), cond({f2, 5}), target({f2, 5});
      for (auto* t : {&xt, &cond, &target}) {
        for (int64_t i = 0; i < t->size(); ++i) (*t)[i] = rng.gaussian();
      }
      auto loss_fn = [&, &model = model]() {
        nn::Tape tape;
        nn::Var v = model.forward_train(tape, xt, cond, 0.61);
        nn::Var loss = tape.mse(v, target);
        tape.backward(loss);
        return tape.val(loss)[0];
      };
      worst = std::max(worst, finite_diff_worst(model.parameters(), loss_fn, 6, seed + 1));
    };
    auto convglu = models::build_preset("convglu-toy", 161, 0xC33);
    run_backbone(*convglu, 0xC34);
    auto frequnet = models::build_preset("freq-unet-lite", 161, 0xC35);
    run_backbone(*frequnet, 0xC36);
  }

  const double elapsed = now_seconds() - t0;
  std::cout << "  worst relative gradient error " << worst << ", " << elapsed << " s\n";
  return worst < 1e-4 && elapsed < 120.0;
}

bool criterion_4() {
  const double t0 = now_seconds();
  bool ok = true;
  util::Rng cfg_rng(0xC4);
  for (int config = 0; config < 5; ++config) {
    // randomized toy configurations of both backbones
    models::ConvGluUnetConfig gc;
    gc.bins = 4 + static_cast<int>(cfg_rng.uniform_int(0, 4));
    gc.encoder_channels = {static_cast<int>(cfg_rng.uniform_int(6, 12)),
                           static_cast<int>(cfg_rng.uniform_int(4, 8))};
    gc.time_embed_dim = 8;
    gc.init_seed = 0xC40 + config;
    models::ConvGluUnet glu(gc);

    models::CausalFreqUnetConfig fc;
    fc.bins = 6 + static_cast<int>(cfg_rng.uniform_int(0, 6));
    fc.num_scales = 2;
    fc.widths = {static_cast<int>(cfg_rng.uniform_int(2, 4)) * 2,
                 static_cast<int>(cfg_rng.uniform_int(2, 5)) * 2};
    fc.gn_groups = 2;
    fc.time_embed_dim = 8;
    fc.init_seed = 0xC50 + config;
    models::CausalFreqUnet fu(fc);

    for (models::Backbone* model : std::initializer_list<models::Backbone*>{&glu, &fu}) {
      const int f2 = 2 * model->bins();
      const int frames = 10;
      util::Rng rng(0xC60 + config);
      nn::Tensor xt({f2, frames}), cond({f2, frames});
      for (auto* t : {&xt, &cond}) {
        for (int64_t i = 0; i < t->size(); ++i) (*t)[i] = rng.gaussian();
      }
      const nn::Tensor base = model->forward(xt, cond, 0.5);
      for (int p = 0; p < 20; ++p) {
        const int n = static_cast<int>(rng.uniform_int(1, frames - 1));
        nn::Tensor xt_p = xt, cond_p = cond;
        const int row = static_cast<int>(rng.uniform_int(0, f2 - 1));
        (rng.uniform() < 0.5 ? xt_p : cond_p)[static_cast<int64_t>(row) * frames + n] += 0.7;
        const nn::Tensor out = model->forward(xt_p, cond_p, 0.5);
        for (int c = 0; c < f2 && ok; ++c) {
          for (int l = 0; l < n; ++l) {
            if (out[static_cast<int64_t>(c) * frames + l] !=
                base[static_cast<int64_t>(c) * frames + l]) {
              ok = false;
              std::cout << "  influence leaked to frame " << l << " < " << n << "\n";
              break;
            }
          }
        }
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  std::cout << "  5 configs x 20 perturbations x 2 backbones, exact-zero check, " << elapsed
            << " s\n";
  return ok && elapsed < 60.0;
}

bool criterion_5() {
  dsp::StftConfig def;
  const double default_ms = def.algorithmic_latency_seconds() * 1000.0;
  dsp::StftConfig wide;
  wide.window_len = 512;
  wide.hop_len = 256;
  wide.fft_len = 512;
  const double wide_ms = wide.algorithmic_latency_seconds() * 1000.0;

  // the full report agrees with the analytic number
  models::ConvGluUnetConfig mc;
  mc.bins = def.bins();
  mc.encoder_channels = {8, 4};
  mc.time_embed_dim = 8;
  models::ConvGluUnet model(mc);
  stream::StreamConfig sc;
  sc.stft = def;
  sc.sampler.nfe = 1;
  const auto report = stream::measure_latency(model, sc, 0.3);

  std::cout << "  default: " << default_ms << " ms, 512/256 config: " << wide_ms
            << " ms, report: " << report.algorithmic_latency_ms << " ms\n";
  return default_ms == 20.0 && wide_ms == 32.0 && report.algorithmic_latency_ms == 20.0;
}

bool criterion_6(Context& ctx) {
  const double t0 = now_seconds();
  ensure_trained_model(ctx);
  const auto ckpt = nn::load_checkpoint(ctx.toy_checkpoint);
  auto model = train::backbone_from_checkpoint(ckpt);

  // a held-out degraded clip at the model's native grid
  auto clips = make_toy_testset(heldout_testset_config(0xC6, 1, 5.0));
  std::vector<double> signal = clips[0].noisy.samples;
  signal.resize(9600);  // 0.6 s keeps 20 chunkings affordable

  double worst = 0.0;
  for (int nfe : {1, 5}) {
    stream::StreamConfig cfg;
    cfg.stft = fm::decode_stft(ckpt.config);
    cfg.compression = fm::decode_compression(ckpt.config);
    cfg.flow = fm::decode_flow(ckpt.config);
    cfg.sampler.nfe = nfe;
    cfg.seed = 0xC61;

    fm::RestoreOptions opt;
    opt.stft = cfg.stft;
    opt.compression = cfg.compression;
    opt.flow = cfg.flow;
    opt.sampler = cfg.sampler;
    opt.seed = cfg.seed;
    opt.normalize_input = false;
    const auto reference =
        fm::restore(dsp::AudioBuffer(signal, 16000), model->velocity_field(), opt).samples;

    util::Rng chunk_rng(0xC62 + nfe);
    for (int chunking = 0; chunking < 20; ++chunking) {
      stream::StreamSession session(*model, cfg);
      std::vector<double> streamed;
      size_t pos = 0;
      while (pos < signal.size()) {
        size_t chunk;
        if (chunking == 0) {
          chunk = signal.size();
        } else if (chunking == 1) {
          chunk = 1;  // sample-by-sample
        } else {
          chunk = static_cast<size_t>(chunk_rng.uniform_int(1, 1000));
        }
        chunk = std::min(chunk, signal.size() - pos);
        auto part = session.push(signal.data() + pos, chunk);
        streamed.insert(streamed.end(), part.begin(), part.end());
        pos += chunk;
      }
      auto tail = session.flush();
      streamed.insert(streamed.end(), tail.begin(), tail.end());
      if (streamed.size() != reference.size()) {
        std::cout << "  length mismatch at nfe " << nfe << "\n";
        return false;
      }
      for (size_t i = 0; i < streamed.size(); ++i) {
        worst = std::max(worst, std::abs(streamed[i] - reference[i]));
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  std::cout << "  worst streaming/offline gap " << worst << " over 20 chunkings x nfe {1,5}, "
            << elapsed << " s\n";
  return worst < 1e-10 && elapsed < 120.0;
}

bool criterion_7() {
  dsp::StftConfig stft;
  bool ok = true;

  // hand-counted declared graphs
  std::vector<models::LayerInfo> pointwise{{"pw", 9, 6, 1, 1, true}};
  const auto rep1 = models::count_complexity(pointwise, stft);
  ok &= rep1.params == 9 && rep1.macs_per_second == 600.0;

  std::vector<models::LayerInfo> stack{
      {"c1", 10, 20, 2, 1, true}, {"c2", 10, 20, 2, 1, true}, {"c3", 10, 20, 2, 1, true}};
  const auto rep2 = models::count_complexity(stack, stft);
  ok &= rep2.receptive_field_frames == 4 && std::abs(rep2.receptive_field_seconds - 0.04) < 1e-12;

  // instantiated toy model: the counter matches the trainable scalar count exactly
  auto toy = models::build_preset("convglu-toy", stft.bins());
  const auto toy_report = models::count_complexity(toy->layer_infos(), stft);
  ok &= toy_report.params == toy->param_count();
  std::cout << "  toy preset: " << toy_report.params << " params (exact match: "
            << (toy_report.params == toy->param_count() ? "yes" : "NO") << ")\n";

  // the large preset is counted and compared; deviations reported, not gated
  auto large = models::build_preset("convglu-large", stft.bins());
  const auto large_report = models::count_complexity(large->layer_infos(), stft);
  ok &= large_report.params == large->param_count();
  const double params_m = large_report.params / 1e6;
  const double gmacs = large_report.macs_per_second / 1e9;
  std::cout << "  convglu-large: " << params_m << " M params (reference 57.6, deviation "
            << params_m - 57.6 << "), " << gmacs << " G MACs/s (reference 3.5, deviation "
            << gmacs - 3.5 << "), rf " << large_report.receptive_field_seconds
            << " s (reference 0.75, deviation " << large_report.receptive_field_seconds - 0.75
            << ")\n";
  return ok;
}

bool criterion_8(Context& ctx) {
  const double t0 = now_seconds();
  ensure_trained_model(ctx);
  if (g_loss_curve.size() < 600) {
    std::cout << "  loss curve too short (" << g_loss_curve.size() << " steps)\n";
    return false;
  }
  auto mean_range = [&](size_t from, size_t to) {
    double acc = 0.0;
    for (size_t i = from; i < to; ++i) acc += g_loss_curve[i];
    return acc / (to - from);
  };
  const double baseline = mean_range(0, 100);  // running mean at step 100
  const size_t tail = std::min<size_t>(500, g_loss_curve.size() / 2);
  const double final_mean = mean_range(g_loss_curve.size() - tail, g_loss_curve.size());
  const double elapsed = now_seconds() - t0;
  std::cout << "  running-mean loss: step-100 baseline " << baseline << ", final " << final_mean
            << " (ratio " << final_mean / baseline << "), criterion time " << elapsed << " s\n";
  return final_mean <= 0.5 * baseline && elapsed < 1800.0;
}

eval::SweepResult run_toy_sweep(Context& ctx, const std::vector<int>& nfe_list,
                                const eval::TestsetConfig& tc, uint64_t sweep_seed) {
  ensure_trained_model(ctx);
  const auto data = nn::load_checkpoint(ctx.toy_checkpoint);
  auto model = train::backbone_from_checkpoint(data);
  auto clips = make_toy_testset(tc);
  eval::SweepConfig sc;
  sc.nfe_list = nfe_list;
  sc.seed = sweep_seed;
  sc.jobs = 2;
  sc.stft = fm::decode_stft(data.config);
  sc.compression = fm::decode_compression(data.config);
  sc.flow = fm::decode_flow(data.config);
  return eval::nfe_sweep(*model, clips, sc);
}

bool criterion_9(Context& ctx) {
  const double t0 = now_seconds();
  const auto result = run_toy_sweep(ctx, {5}, heldout_testset_config(0xC9, 50, 5.0), 0xC91);
  const auto aggs = result.aggregates();
  const double improvement = aggs.at(0).mean_si_sdr_improvement;
  const double elapsed = now_seconds() - t0;
  std::cout << "  mean si-sdr improvement at nfe 5: " << improvement << " dB over 50 clips at"
            << " 5 dB snr, " << elapsed << " s\n";
  return improvement >= 3.0;
}

bool criterion_10(Context& ctx) {
  const double t0 = now_seconds();
  const auto result =
      run_toy_sweep(ctx, {1, 5, 20}, heldout_testset_config(0xC10, 50, 5.0), 0xC101);
  double at1 = 0.0, at5 = 0.0, at20 = 0.0;
  for (const auto& agg : result.aggregates()) {
    if (agg.nfe == 1) at1 = agg.mean_si_sdr_out;
    if (agg.nfe == 5) at5 = agg.mean_si_sdr_out;
    if (agg.nfe == 20) at20 = agg.mean_si_sdr_out;
  }
  // paired-seed discipline holds by construction; verify from the rows
  bool paired = true;
  for (const auto& a : result.rows) {
    for (const auto& b : result.rows) {
      if (a.clip == b.clip && a.clip_seed != b.clip_seed) paired = false;
    }
  }
  const double elapsed = now_seconds() - t0;
  std::cout << "  mean si-sdr: nfe1 " << at1 << ", nfe5 " << at5 << ", nfe20 " << at20
            << " dB (paired seeds: " << (paired ? "yes" : "NO") << "), " << elapsed << " s\n";
  return paired && at5 >= at1 && std::abs(at20 - at5) <= 1.0 && elapsed < 600.0;
}

bool criterion_11(Context& ctx) {
  const double t0 = now_seconds();
  // varied input quality: randomized additive-noise snr across a wide range
  eval::TestsetConfig tc;
  tc.num_clips = 48;
  tc.clip_seconds = 2.0;
  tc.seed = 0xC11;
  tc.chains.kinds = {degrade::DegradationKind::kAdditiveNoise};
  tc.chains.min_ops = 1;
  tc.chains.max_ops = 1;
  tc.chains.snr_db_lo = -5.0;
  tc.chains.snr_db_hi = 25.0;
  const auto result = run_toy_sweep(ctx, {5}, tc, 0xC111);
  const auto rows = eval::breakdown_report(result, eval::BreakdownAxis::kInputQualityBin);
  double worst_q = 0.0, best_q = 0.0;
  for (const auto& r : rows) {
    if (r.bucket == "q1_worst") worst_q = r.mean_improvement;
    if (r.bucket == "q4_best") best_q = r.mean_improvement;
  }
  const double elapsed = now_seconds() - t0;
  std::cout << "  improvement: worst quartile " << worst_q << " dB, best quartile " << best_q
            << " dB, " << elapsed << " s\n";
  return worst_q > best_q;
}

bool criterion_12(Context& ctx) {
  const double t0 = now_seconds();
  const fs::path dir = ctx.work_dir / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto strip_wall = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  auto shell = [](const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };

  // a degraded input for the enhance stage
  auto clips = make_toy_testset(heldout_testset_config(0xC12, 1, 5.0));
  const std::string noisy_wav = (dir / "noisy.wav").string();
  dsp::write_wav(noisy_wav, clips[0].noisy);

  // the same pipeline twice: train -> enhance -> sweep, identical seeds
  util::KvConfig base;
  base.set("train.steps", static_cast<int64_t>(300));
  base.set("train.batch_size", static_cast<int64_t>(2));
  base.set("train.learning_rate", 1e-3);
  base.set("train.segment_seconds", 0.5);
  base.set("train.seed", static_cast<int64_t>(0xD12));
  base.set("train.backbone", std::string("convglu-toy"));
  base.set("chains.kinds", std::string("additive_noise"));

  std::vector<std::string> loss, wavs, sweeps;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path run = dir / ("pass" + std::to_string(pass));
    util::KvConfig kv = base;
    kv.set("train.out_dir", run.string());
    const std::string cfg_path = (dir / ("cfg" + std::to_string(pass) + ".txt")).string();
    kv.save(cfg_path);
    if (shell(std::string(FLOWSR_BIN) + " train --config " + cfg_path) != 0) {
      std::cout << "  train pass " << pass << " failed\n";
      return false;
    }
    const std::string ckpt = (run / "checkpoint.fsr").string();
    const std::string enhanced = (run / "enhanced.wav").string();
    if (shell(std::string(FLOWSR_BIN) + " enhance --in " + noisy_wav + " --out " + enhanced +
              " --checkpoint " + ckpt + " --nfe 5 --seed 77") != 0) {
      std::cout << "  enhance pass " << pass << " failed\n";
      return false;
    }
    const std::string sweep_csv = (run / "sweep.csv").string();
    if (shell(std::string(FLOWSR_BIN) + " sweep --checkpoint " + ckpt +
              " --toy 4 --toy-seconds 0.6 --snr 5 --nfe-list 1,2,5 --seed 3 --out " +
              sweep_csv) != 0) {
      std::cout << "  sweep pass " << pass << " failed\n";
      return false;
    }
    loss.push_back(strip_wall(slurp(run / "loss.csv")));
    wavs.push_back(slurp(enhanced));
    sweeps.push_back(slurp(sweep_csv));
  }
  const double elapsed = now_seconds() - t0;
  const bool ok = loss[0] == loss[1] && wavs[0] == wavs[1] && sweeps[0] == sweeps[1];
  std::cout << "  loss csv match: " << (loss[0] == loss[1] ? "yes" : "NO")
            << ", wav match: " << (wavs[0] == wavs[1] ? "yes" : "NO")
            << ", sweep csv match: " << (sweeps[0] == sweeps[1] ? "yes" : "NO") << ", "
            << elapsed << " s\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criteria" && i + 1 < argc) {
      for (const auto& part : util::split(argv[++i], ',')) selected.insert(std::stoi(part));
    } else if (arg == "--train-steps" && i + 1 < argc) {
      ctx.train_steps = std::stoll(argv[++i]);
    } else if (arg == "--work-dir" && i + 1 < argc) {
      ctx.work_dir = argv[++i];
    } else {
      std::cerr << "usage: flowsr_acceptance [--criteria 1,2,...] [--train-steps N]"
                << " [--work-dir D]\n";
      return 1;
    }
  }

  struct Criterion {
    int id;
    const char* title;
    std::function<bool()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "flow-map consistency (1000 randomized cases, 1e-12)", [&] { return criterion_1(); }},
      {2, "exact one-step transport (100 cases, machine precision)",
       [&] { return criterion_2(); }},
      {3, "gradient correctness (finite differences, primitives + both toy backbones)",
       [&] { return criterion_3(); }},
      {4, "causality (zero influence on earlier frames, both backbones)",
       [&] { return criterion_4(); }},
      {5, "latency (default config exactly 20 ms; 512/256 config 32 ms)",
       [&] { return criterion_5(); }},
      {6, "streaming/offline equivalence (20 chunkings, nfe {1,5}, 1e-10)",
       [&] { return criterion_6(ctx); }},
      {7, "complexity counter (hand counts exact; large preset compared, deviations reported)",
       [&] { return criterion_7(); }},
      {8, "toy training (running-mean loss falls >= 50% from its step-100 value)",
       [&] { return criterion_8(ctx); }},
      {9, "toy restoration quality (mean si-sdr improvement >= +3 dB at nfe 5)",
       [&] { return criterion_9(ctx); }},
      {10, "nfe trend (nfe5 >= nfe1; |nfe20 - nfe5| <= 1 dB, paired seeds)",
       [&] { return criterion_10(ctx); }},
      {11, "severity trend (worst input quartile improves more than the best)",
       [&] { return criterion_11(ctx); }},
      {12, "determinism (train + enhance + sweep rerun bit-identically)",
       [&] { return criterion_12(ctx); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.id)) continue;
    std::cout << "criterion " << criterion.id << ": " << criterion.title << "\n";
    bool ok = false;
    try {
      ok = criterion.run();
    } catch (const std::exception& e) {
      std::cout << "  exception: " << e.what() << "\n";
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id << ": "
              << criterion.title << "\n";
    if (!ok) ++failures;
  }
  if (failures > 0) std::cout << failures << " criteria failed\n";
  return failures;
}
