#include <cmath>
#include <memory>

#include "doctest.h"
#include "flowsr/models/causal_freq_unet.hpp"
#include "flowsr/models/complexity.hpp"
#include "flowsr/models/convglu_unet.hpp"
#include "flowsr/models/presets.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

using namespace flowsr;
using models::Backbone;
using nn::Tensor;

namespace {

Tensor random_tensor(std::vector<int> shape, uint64_t seed, double scale = 1.0) {
  util::Rng rng(seed);
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.size(); ++i) t[i] = scale * rng.gaussian();
  return t;
}

models::ConvGluUnetConfig tiny_convglu(int bins = 5) {
  models::ConvGluUnetConfig cfg;
  cfg.bins = bins;
  cfg.encoder_channels = {8, 6, 4};
  cfg.time_embed_dim = 8;
  return cfg;
}

models::CausalFreqUnetConfig tiny_frequnet(int bins = 9) {
  models::CausalFreqUnetConfig cfg;
  cfg.bins = bins;
  cfg.num_scales = 2;
  cfg.widths = {4, 6};
  cfg.gn_groups = 2;
  cfg.time_embed_dim = 8;
  return cfg;
}

void randomize_parameters(Backbone& model, uint64_t seed) {
  // causality must hold for any weights; zero-initialized heads would hide
  // influence, so give every tensor non-degenerate values
  util::Rng rng(seed);
  for (auto* p : model.parameters()) {
    for (int64_t i = 0; i < p->value.size(); ++i) p->value[i] = 0.2 * rng.gaussian();
  }
}

void check_causality(Backbone& model, uint64_t seed, int perturbations) {
  randomize_parameters(model, seed + 1000);
  const int f2 = 2 * model.bins();
  const int frames = 12;
  Tensor xt = random_tensor({f2, frames}, seed);
  Tensor cond = random_tensor({f2, frames}, seed + 1);
  const Tensor base = model.forward(xt, cond, 0.4);
  util::Rng rng(seed + 2);
  for (int p = 0; p < perturbations; ++p) {
    const int n = static_cast<int>(rng.uniform_int(1, frames - 1));
    Tensor xt_p = xt, cond_p = cond;
    const bool hit_cond = rng.uniform() < 0.5;
    const int row = static_cast<int>(rng.uniform_int(0, f2 - 1));
    (hit_cond ? cond_p : xt_p)[static_cast<int64_t>(row) * frames + n] += 0.5;
    const Tensor out = model.forward(xt_p, cond_p, 0.4);
    bool changed_later = false;
    for (int c = 0; c < f2; ++c) {
      for (int l = 0; l < frames; ++l) {
        const double a = out[static_cast<int64_t>(c) * frames + l];
        const double b = base[static_cast<int64_t>(c) * frames + l];
        if (l < n) {
          CHECK(a == b);  // strictly earlier frames: exact zero influence
        } else if (a != b) {
          changed_later = true;
        }
      }
    }
    CHECK(changed_later);  // the perturbation must reach the output at all
  }
}

void check_stream_parity(const Backbone& model, Backbone& mutable_model, uint64_t seed) {
  const int f2 = 2 * model.bins();
  const int frames = 10;
  Tensor xt = random_tensor({f2, frames}, seed, 0.7);
  Tensor cond = random_tensor({f2, frames}, seed + 1, 0.7);
  for (double t : {0.0, 0.55}) {
    const Tensor offline = mutable_model.forward(xt, cond, t);
    auto stream = model.open_stream(t);
    std::vector<double> xt_col(f2), cond_col(f2), v_col(f2);
    for (int l = 0; l < frames; ++l) {
      for (int c = 0; c < f2; ++c) {
        xt_col[c] = xt[static_cast<int64_t>(c) * frames + l];
        cond_col[c] = cond[static_cast<int64_t>(c) * frames + l];
      }
      stream->step(xt_col.data(), cond_col.data(), v_col.data());
      for (int c = 0; c < f2; ++c) {
        const double ref = offline[static_cast<int64_t>(c) * frames + l];
        CHECK(v_col[c] == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

}  // namespace

TEST_CASE("convglu-unet toy: shape, finiteness, train/apply agreement") {
  models::ConvGluUnet model(tiny_convglu());
  const int f2 = 2 * model.bins();
  Tensor xt = random_tensor({f2, 7}, 1);
  Tensor cond = random_tensor({f2, 7}, 2);
  Tensor out = model.forward(xt, cond, 0.3);
  REQUIRE(out.shape() == std::vector<int>{f2, 7});
  CHECK(nn::all_finite(out));

  nn::Tape tape;
  nn::Var v = model.forward_train(tape, xt, cond, 0.3);
  const Tensor& trained = tape.val(v);
  for (int64_t i = 0; i < out.size(); ++i) CHECK(trained[i] == out[i]);
}

TEST_CASE("convglu-unet: causality and streaming parity") {
  for (uint64_t s = 0; s < 3; ++s) {
    models::ConvGluUnetConfig cfg = tiny_convglu(4 + static_cast<int>(s));
    cfg.init_seed = 0x100 + s;
    models::ConvGluUnet model(cfg);
    check_causality(model, 10 + s, 6);
    check_stream_parity(model, model, 20 + s);
  }
}

TEST_CASE("causal-freq-unet: shape, causality, streaming parity") {
  models::CausalFreqUnet model(tiny_frequnet());
  const int f2 = 2 * model.bins();
  Tensor xt = random_tensor({f2, 6}, 3);
  Tensor cond = random_tensor({f2, 6}, 4);
  Tensor out = model.forward(xt, cond, 0.7);
  REQUIRE(out.shape() == std::vector<int>{f2, 6});
  CHECK(nn::all_finite(out));

  nn::Tape tape;
  nn::Var v = model.forward_train(tape, xt, cond, 0.7);
  for (int64_t i = 0; i < out.size(); ++i) CHECK(tape.val(v)[i] == out[i]);

  for (uint64_t s = 0; s < 2; ++s) {
    models::CausalFreqUnetConfig cfg = tiny_frequnet(8 + static_cast<int>(s) * 3);
    cfg.init_seed = 0x200 + s;
    models::CausalFreqUnet m(cfg);
    check_causality(m, 30 + s, 5);
    check_stream_parity(m, m, 40 + s);
  }
}

TEST_CASE("causal-freq-unet: config validation") {
  auto cfg = tiny_frequnet();
  cfg.widths = {4, 6, 8};  // wrong length for num_scales = 2
  CHECK_THROWS_AS(models::CausalFreqUnet{cfg}, ConfigError);
  auto cfg2 = tiny_frequnet();
  cfg2.gn_groups = 5;  // does not divide width 4
  CHECK_THROWS_AS(models::CausalFreqUnet{cfg2}, ConfigError);
  auto cfg3 = tiny_frequnet();
  cfg3.kernel_f = 2;
  CHECK_THROWS_AS(models::CausalFreqUnet{cfg3}, ConfigError);

  // frequency padding: 9 bins at 2 scales pad to 12, cropped back at output
  CHECK(tiny_frequnet(9).padded_bins() == 12);
  CHECK(tiny_frequnet(8).padded_bins() == 8);
}

TEST_CASE("internal temporal length is preserved across the frequency pyramid") {
  // The interface contract (out frames == in frames) plus exact causality of
  // every internal op already pins this; check the output contract directly
  // for several lengths.
  models::CausalFreqUnet model(tiny_frequnet());
  const int f2 = 2 * model.bins();
  for (int frames : {1, 3, 17}) {
    Tensor out = model.forward(random_tensor({f2, frames}, 50 + frames),
                               random_tensor({f2, frames}, 60 + frames), 0.2);
    CHECK(out.dim(1) == frames);
  }
}

TEST_CASE("complexity counter: hand-counted declared graphs") {
  dsp::StftConfig stft;  // 16 kHz, hop 160 -> 100 frames/s

  // single pointwise conv, C_in 2 -> C_out 3: 6 MACs/frame -> 600 MACs/s
  std::vector<models::LayerInfo> pointwise{{"pw", 2 * 3 + 3, 6, 1, 1, true}};
  auto rep = models::count_complexity(pointwise, stft);
  CHECK(rep.macs_per_second == doctest::Approx(600.0));
  CHECK(rep.params == 9);
  CHECK(rep.receptive_field_seconds == doctest::Approx(0.010));  // 1 frame

  // three stacked k=2 convs: rf = 1 + 3 = 4 frames = 0.04 s at 10 ms hop
  std::vector<models::LayerInfo> stack{{"c1", 0, 0, 2, 1, true},
                                       {"c2", 0, 0, 2, 1, true},
                                       {"c3", 0, 0, 2, 1, true}};
  CHECK(models::count_complexity(stack, stft).receptive_field_seconds ==
        doctest::Approx(0.040));

  // dilations enter the chain multiplicatively
  std::vector<models::LayerInfo> dilated{{"c1", 0, 0, 2, 1, true},
                                         {"c2", 0, 0, 2, 2, true},
                                         {"c3", 0, 0, 2, 4, true},
                                         {"skip", 0, 0, 9, 9, false}};
  CHECK(models::count_complexity(dilated, stft).receptive_field_frames == 8);
}

TEST_CASE("layer_infos params match the exact trainable scalar count") {
  models::ConvGluUnet glu(tiny_convglu());
  int64_t from_infos = 0;
  for (const auto& info : glu.layer_infos()) from_infos += info.params;
  CHECK(from_infos == glu.param_count());

  models::CausalFreqUnet fu(tiny_frequnet());
  int64_t from_infos2 = 0;
  for (const auto& info : fu.layer_infos()) from_infos2 += info.params;
  CHECK(from_infos2 == fu.param_count());
}

TEST_CASE("convglu receptive field: encoder dilation doubling plus kernel-7 bottleneck") {
  dsp::StftConfig stft;
  models::ConvGluUnetConfig cfg;
  cfg.bins = 161;
  cfg.encoder_channels = {32, 16, 8};
  models::ConvGluUnet model(cfg);
  // rf frames = 1 + (1 + 2 + 4) + 6 = 14 -> 0.14 s; the 1x1 decoder adds none
  auto rep = models::count_complexity(model.layer_infos(), stft);
  CHECK(rep.receptive_field_frames == 14);
  CHECK(rep.receptive_field_seconds == doctest::Approx(0.14));
  for (const auto& info : model.layer_infos()) {
    if (info.name.rfind("dec", 0) == 0) CHECK(info.kernel_t == 1);
  }
}

TEST_CASE("presets resolve and unknown names are rejected") {
  CHECK(models::is_preset("convglu-toy"));
  CHECK_FALSE(models::is_preset("bogus"));
  CHECK_THROWS_AS(models::build_preset("bogus", 161), ConfigError);

  auto toy = models::build_preset("convglu-toy", 161, 1);
  CHECK(toy->kind() == "convglu_unet");
  CHECK(toy->bins() == 161);

  // config echo round trip rebuilds an identical model
  auto kv = toy->config();
  auto again = models::build_from_config(kv);
  CHECK(again->param_count() == toy->param_count());
  Tensor xt = random_tensor({322, 3}, 70);
  Tensor cond = random_tensor({322, 3}, 71);
  Tensor a = toy->forward(xt, cond, 0.5);
  Tensor b = again->forward(xt, cond, 0.5);
  for (int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("pack/unpack spectrogram round trip") {
  util::Rng rng(80);
  dsp::ComplexSpectrogram spec(6, 4);
  for (auto& c : spec.data) c = {rng.gaussian(), rng.gaussian()};
  Tensor packed = models::pack_spectrogram(spec);
  REQUIRE(packed.shape() == std::vector<int>{12, 4});
  auto back = models::unpack_spectrogram(packed);
  for (size_t i = 0; i < spec.data.size(); ++i) CHECK(back.data[i] == spec.data[i]);

  std::vector<std::complex<double>> col(6);
  for (auto& c : col) c = {rng.gaussian(), rng.gaussian()};
  std::vector<double> packed_col(12);
  models::pack_column(col.data(), 6, packed_col.data());
  std::vector<std::complex<double>> back_col(6);
  models::unpack_column(packed_col.data(), 6, back_col.data());
  for (int f = 0; f < 6; ++f) CHECK(back_col[f] == col[f]);
}

TEST_CASE("same init seed gives bit-identical models") {
  models::ConvGluUnetConfig cfg = tiny_convglu();
  models::ConvGluUnet m1(cfg), m2(cfg);
  auto p1 = m1.parameters();
  auto p2 = m2.parameters();
  REQUIRE(p1.size() == p2.size());
  for (size_t i = 0; i < p1.size(); ++i) {
    for (int64_t j = 0; j < p1[i]->value.size(); ++j) {
      CHECK(p1[i]->value[j] == p2[i]->value[j]);
    }
  }
}
