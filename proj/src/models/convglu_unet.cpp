#include "flowsr/models/convglu_unet.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "flowsr/util/error.hpp"

namespace flowsr::models {

using nn::Tape;
using nn::Tensor;
using nn::Var;

void ConvGluUnetConfig::validate() const {
  if (bins < 1) throw ConfigError("convglu_unet: bins must be positive");
  if (encoder_channels.empty()) throw ConfigError("convglu_unet: encoder_channels is empty");
  for (int c : encoder_channels) {
    if (c < 1) throw ConfigError("convglu_unet: channel counts must be positive");
  }
  if (encoder_kernel < 1 || bottleneck_kernel < 1) {
    throw ConfigError("convglu_unet: kernels must be >= 1");
  }
  if (time_embed_dim < 2 || time_embed_dim % 2 != 0) {
    throw ConfigError("convglu_unet: time_embed_dim must be even and >= 2");
  }
  for (size_t i = 1; i < encoder_channels.size(); ++i) {
    if (encoder_channels[i] >= encoder_channels[i - 1]) {
      std::cerr << "[flowsr] warning: encoder channels not strictly decreasing at level " << i
                << " (" << encoder_channels[i - 1] << " -> " << encoder_channels[i] << ")\n";
    }
  }
}

util::KvConfig ConvGluUnetConfig::to_config() const {
  util::KvConfig kv;
  kv.set("model.kind", std::string("convglu_unet"));
  kv.set("model.bins", static_cast<int64_t>(bins));
  std::string chans;
  for (size_t i = 0; i < encoder_channels.size(); ++i) {
    if (i) chans += ",";
    chans += std::to_string(encoder_channels[i]);
  }
  kv.set("model.encoder_channels", chans);
  kv.set("model.encoder_kernel", static_cast<int64_t>(encoder_kernel));
  kv.set("model.bottleneck_kernel", static_cast<int64_t>(bottleneck_kernel));
  kv.set("model.dilation_doubling", dilation_doubling);
  kv.set("model.time_embed_dim", static_cast<int64_t>(time_embed_dim));
  kv.set("model.fourier_scale", fourier_scale);
  kv.set("model.init_seed", static_cast<int64_t>(init_seed));
  return kv;
}

ConvGluUnetConfig ConvGluUnetConfig::from_config(const util::KvConfig& kv) {
  ConvGluUnetConfig cfg;
  cfg.bins = static_cast<int>(kv.get_int_or("model.bins", cfg.bins));
  if (kv.has("model.encoder_channels")) {
    cfg.encoder_channels.clear();
    for (const auto& part : util::split(kv.get_string("model.encoder_channels"), ',')) {
      cfg.encoder_channels.push_back(std::stoi(part));
    }
  }
  cfg.encoder_kernel = static_cast<int>(kv.get_int_or("model.encoder_kernel", 2));
  cfg.bottleneck_kernel = static_cast<int>(kv.get_int_or("model.bottleneck_kernel", 7));
  cfg.dilation_doubling = kv.get_bool_or("model.dilation_doubling", true);
  cfg.time_embed_dim = static_cast<int>(kv.get_int_or("model.time_embed_dim", 64));
  cfg.fourier_scale = kv.get_double_or("model.fourier_scale", 16.0);
  cfg.init_seed = static_cast<uint64_t>(kv.get_int_or("model.init_seed", 0x5eed));
  return cfg;
}

namespace {

// One tanh-GLU conv unit: two structurally identical branches. The projected
// time embedding biases both branches right after their convs; the biased
// tanh gate is what gives every block a time-dependent multiplicative gain.
struct GluBlock {
  int in_ch = 0, out_ch = 0, kernel = 1, dilation = 1;
  bool separable = false;
  nn::DepthwiseSeparableConv1d sep_lin, sep_gate;
  nn::CausalConv1d pw_lin, pw_gate;
  nn::Linear temb_proj, temb_gate_proj;

  GluBlock() = default;
  GluBlock(const std::string& name, int in, int out, int k, int d, int embed_dim,
           util::Rng& rng)
      : in_ch(in), out_ch(out), kernel(k), dilation(d), separable(k > 1) {
    if (separable) {
      sep_lin = nn::DepthwiseSeparableConv1d(name + ".lin", in, out, k, d, rng);
      sep_gate = nn::DepthwiseSeparableConv1d(name + ".gate", in, out, k, d, rng);
    } else {
      pw_lin = nn::CausalConv1d(name + ".lin", in, out, 1, 1, 1, rng);
      pw_gate = nn::CausalConv1d(name + ".gate", in, out, 1, 1, 1, rng);
    }
    temb_proj = nn::Linear(name + ".temb", embed_dim, out, rng);
    temb_gate_proj = nn::Linear(name + ".temb_gate", embed_dim, out, rng);
  }

  Var forward(Tape& tape, Var x, Var emb) const {
    Var lin = separable ? sep_lin.forward(tape, x) : pw_lin.forward(tape, x);
    lin = tape.add_channel_bias(lin, temb_proj.forward(tape, emb));
    Var gate = separable ? sep_gate.forward(tape, x) : pw_gate.forward(tape, x);
    gate = tape.add_channel_bias(gate, temb_gate_proj.forward(tape, emb));
    return nn::glu_tanh(tape, lin, gate);
  }

  Tensor apply(const Tensor& x, const Tensor& emb) const {
    Tensor lin = separable ? sep_lin.apply(x) : pw_lin.apply(x);
    const Tensor bias = temb_proj.apply(emb);
    const Tensor gate_bias = temb_gate_proj.apply(emb);
    const int l_len = lin.dim(1);
    for (int c = 0; c < out_ch; ++c) {
      double* row = lin.data() + static_cast<int64_t>(c) * l_len;
      for (int l = 0; l < l_len; ++l) row[l] += bias[c];
    }
    Tensor gate = separable ? sep_gate.apply(x) : pw_gate.apply(x);
    for (int c = 0; c < out_ch; ++c) {
      double* grow = gate.data() + static_cast<int64_t>(c) * l_len;
      for (int l = 0; l < l_len; ++l) grow[l] += gate_bias[c];
    }
    for (int64_t i = 0; i < lin.size(); ++i) lin[i] *= std::tanh(gate[i]);
    return lin;
  }

  struct State {
    nn::DepthwiseSeparableConv1d::State lin, gate;
    Tensor bias, gate_bias;  // projected time embedding, fixed per stream
    Tensor gate_col;         // [out] scratch
  };

  State make_state(const Tensor& emb) const {
    State s;
    if (separable) {
      s.lin = sep_lin.make_state();
      s.gate = sep_gate.make_state();
    }
    s.bias = temb_proj.apply(emb);
    s.gate_bias = temb_gate_proj.apply(emb);
    s.gate_col = Tensor({out_ch});
    return s;
  }

  void step(State& s, const double* x_col, double* y_col) const {
    if (separable) {
      sep_lin.step(s.lin, x_col, y_col);
      sep_gate.step(s.gate, x_col, s.gate_col.data());
    } else {
      nn::CausalConv1d::State none{Tensor({0, 0})};
      pw_lin.step(none, x_col, y_col);
      pw_gate.step(none, x_col, s.gate_col.data());
    }
    for (int c = 0; c < out_ch; ++c) {
      y_col[c] = (y_col[c] + s.bias[c]) * std::tanh(s.gate_col[c] + s.gate_bias[c]);
    }
  }

  void collect(std::vector<nn::Parameter*>& out) {
    if (separable) {
      sep_lin.collect(out);
      sep_gate.collect(out);
    } else {
      pw_lin.collect(out);
      pw_gate.collect(out);
    }
    temb_proj.collect(out);
    temb_gate_proj.collect(out);
  }

  int64_t param_count() const {
    const int64_t conv = separable ? sep_lin.param_count() + sep_gate.param_count()
                                   : pw_lin.param_count() + pw_gate.param_count();
    return conv + temb_proj.param_count() + temb_gate_proj.param_count();
  }

  int64_t macs_per_frame() const {
    return separable ? sep_lin.macs_per_frame() + sep_gate.macs_per_frame()
                     : pw_lin.macs_per_frame() + pw_gate.macs_per_frame();
  }
};

}  // namespace

struct ConvGluUnet::Impl {
  nn::TimeEmbedMlp temb;
  std::vector<GluBlock> encoder;
  GluBlock bottleneck;
  std::vector<GluBlock> decoder;        // plain 1x1 GLUs
  std::vector<nn::CausalConv1d> skips;  // 1x1 linear maps, one per encoder level
  GluBlock in_skip;                     // level-0 skip: raw input to output, 1x1 GLU
  nn::CausalConv1d out_proj;
};

ConvGluUnet::ConvGluUnet(const ConvGluUnetConfig& cfg) : cfg_(cfg), impl_(new Impl) {
  cfg_.validate();
  util::Rng rng(cfg_.init_seed);
  const int in_channels = 4 * cfg_.bins;  // state + conditioning, re/im packed
  const auto& ch = cfg_.encoder_channels;
  const int levels = static_cast<int>(ch.size());

  impl_->temb = nn::TimeEmbedMlp("temb", cfg_.time_embed_dim, cfg_.time_embed_dim,
                                 cfg_.fourier_scale, rng);
  for (int i = 0; i < levels; ++i) {
    const int dil = cfg_.dilation_doubling ? (1 << i) : 1;
    impl_->encoder.emplace_back("enc" + std::to_string(i), i == 0 ? in_channels : ch[i - 1],
                                ch[i], cfg_.encoder_kernel, dil, cfg_.time_embed_dim, rng);
  }
  impl_->bottleneck = GluBlock("bottleneck", ch.back(), ch.back(), cfg_.bottleneck_kernel, 1,
                               cfg_.time_embed_dim, rng);
  for (int j = levels - 1; j >= 1; --j) {
    impl_->decoder.emplace_back("dec" + std::to_string(levels - 1 - j), ch[j], ch[j - 1], 1, 1,
                                cfg_.time_embed_dim, rng);
  }
  for (int i = 0; i < levels; ++i) {
    impl_->skips.emplace_back("skip" + std::to_string(i), ch[i], ch[i], 1, 1, 1, rng);
  }
  // The level-0 skip runs from the raw input to the output as a 1x1 GLU.
  // Narrow presets need it: without a full-rank path from x_t to the
  // velocity, a head of rank min(channels) cannot represent the
  // noise-directed component of the target field, and the time-biased tanh
  // gate supplies the time-varying gain that component carries.
  impl_->in_skip =
      GluBlock("in_skip", in_channels, 2 * cfg_.bins, 1, 1, cfg_.time_embed_dim, rng);
  impl_->out_proj = nn::CausalConv1d("out_proj", ch[0], 2 * cfg_.bins, 1, 1, 1, rng);
  // zero-initialized heads: the velocity field starts at zero, so the first
  // training steps see the data-variance loss floor instead of amplified
  // encoder noise. For the GLU skip, zeroing the linear branch suffices.
  std::vector<nn::Parameter*> head;
  impl_->in_skip.pw_lin.collect(head);
  impl_->in_skip.temb_proj.collect(head);
  impl_->out_proj.collect(head);
  for (auto* p : head) p->value.fill(0.0);
}

ConvGluUnet::~ConvGluUnet() = default;

Var ConvGluUnet::forward_train(Tape& tape, const Tensor& xt, const Tensor& cond, double t) {
  Var x = tape.concat_channels(tape.input(xt), tape.input(cond));
  Var emb = impl_->temb.forward(tape, t);
  Var input_skip = impl_->in_skip.forward(tape, x, emb);
  std::vector<Var> feats;
  for (const auto& block : impl_->encoder) {
    x = block.forward(tape, x, emb);
    feats.push_back(x);
  }
  Var h = impl_->bottleneck.forward(tape, x, emb);
  h = tape.add(h, impl_->skips.back().forward(tape, feats.back()));
  const int levels = static_cast<int>(impl_->encoder.size());
  for (int j = 0; j < static_cast<int>(impl_->decoder.size()); ++j) {
    h = impl_->decoder[j].forward(tape, h, emb);
    const int level = levels - 2 - j;
    h = tape.add(h, impl_->skips[level].forward(tape, feats[level]));
  }
  return tape.add(impl_->out_proj.forward(tape, h), input_skip);
}

Tensor ConvGluUnet::forward(const Tensor& xt, const Tensor& cond, double t) const {
  const int l_len = xt.dim(1);
  Tensor x({xt.dim(0) + cond.dim(0), l_len});
  std::copy(xt.data(), xt.data() + xt.size(), x.data());
  std::copy(cond.data(), cond.data() + cond.size(), x.data() + xt.size());
  const Tensor emb = impl_->temb.apply(t);
  const Tensor input_skip = impl_->in_skip.apply(x, emb);
  std::vector<Tensor> feats;
  for (const auto& block : impl_->encoder) {
    x = block.apply(x, emb);
    feats.push_back(x);
  }
  Tensor h = impl_->bottleneck.apply(x, emb);
  {
    const Tensor s = impl_->skips.back().apply(feats.back());
    for (int64_t i = 0; i < h.size(); ++i) h[i] += s[i];
  }
  const int levels = static_cast<int>(impl_->encoder.size());
  for (int j = 0; j < static_cast<int>(impl_->decoder.size()); ++j) {
    h = impl_->decoder[j].apply(h, emb);
    const int level = levels - 2 - j;
    const Tensor s = impl_->skips[level].apply(feats[level]);
    for (int64_t i = 0; i < h.size(); ++i) h[i] += s[i];
  }
  Tensor out = impl_->out_proj.apply(h);
  for (int64_t i = 0; i < out.size(); ++i) out[i] += input_skip[i];
  return out;
}

namespace {

struct ConvGluStream final : public BackboneStream {
  const ConvGluUnet::Impl* net;
  int bins;
  std::vector<GluBlock::State> enc_states;
  GluBlock::State bottleneck_state;
  GluBlock::State in_skip_state;
  std::vector<GluBlock::State> dec_states;
  std::vector<Tensor> feat_cols;  // per encoder level [ch]
  Tensor in_col, h_col, tmp_col, skip_col, out_col, in_skip_col;

  void step(const double* xt_col, const double* cond_col, double* v_col) override {
    const int two_f = 2 * bins;
    std::copy(xt_col, xt_col + two_f, in_col.data());
    std::copy(cond_col, cond_col + two_f, in_col.data() + two_f);
    net->in_skip.step(in_skip_state, in_col.data(), in_skip_col.data());
    const double* cur = in_col.data();
    for (size_t i = 0; i < net->encoder.size(); ++i) {
      net->encoder[i].step(enc_states[i], cur, feat_cols[i].data());
      cur = feat_cols[i].data();
    }
    net->bottleneck.step(bottleneck_state, cur, h_col.data());
    nn::CausalConv1d::State none{Tensor({0, 0})};
    net->skips.back().step(none, feat_cols.back().data(), skip_col.data());
    const int last_ch = static_cast<int>(feat_cols.back().size());
    for (int c = 0; c < last_ch; ++c) h_col[c] += skip_col[c];
    const int levels = static_cast<int>(net->encoder.size());
    for (size_t j = 0; j < net->decoder.size(); ++j) {
      net->decoder[j].step(dec_states[j], h_col.data(), tmp_col.data());
      const int level = levels - 2 - static_cast<int>(j);
      net->skips[level].step(none, feat_cols[level].data(), skip_col.data());
      const int ch = net->decoder[j].out_ch;
      for (int c = 0; c < ch; ++c) h_col[c] = tmp_col[c] + skip_col[c];
    }
    net->out_proj.step(none, h_col.data(), out_col.data());
    for (int c = 0; c < two_f; ++c) v_col[c] = out_col[c] + in_skip_col[c];
  }
};

}  // namespace

std::unique_ptr<BackboneStream> ConvGluUnet::open_stream(double t) const {
  auto s = std::make_unique<ConvGluStream>();
  s->net = impl_.get();
  s->bins = cfg_.bins;
  const Tensor emb = impl_->temb.apply(t);
  int max_ch = 4 * cfg_.bins;
  for (const auto& block : impl_->encoder) {
    s->enc_states.push_back(block.make_state(emb));
    s->feat_cols.emplace_back(Tensor({block.out_ch}));
    max_ch = std::max(max_ch, block.out_ch);
  }
  s->bottleneck_state = impl_->bottleneck.make_state(emb);
  s->in_skip_state = impl_->in_skip.make_state(emb);
  for (const auto& block : impl_->decoder) {
    s->dec_states.push_back(block.make_state(emb));
    max_ch = std::max(max_ch, block.out_ch);
  }
  s->in_col = Tensor({4 * cfg_.bins});
  s->h_col = Tensor({max_ch});
  s->tmp_col = Tensor({max_ch});
  s->skip_col = Tensor({max_ch});
  s->out_col = Tensor({2 * cfg_.bins});
  s->in_skip_col = Tensor({2 * cfg_.bins});
  return s;
}

std::vector<nn::Parameter*> ConvGluUnet::parameters() {
  std::vector<nn::Parameter*> out;
  impl_->temb.collect(out);
  for (auto& b : impl_->encoder) b.collect(out);
  impl_->bottleneck.collect(out);
  for (auto& b : impl_->decoder) b.collect(out);
  for (auto& s : impl_->skips) s.collect(out);
  impl_->in_skip.collect(out);
  impl_->out_proj.collect(out);
  return out;
}

std::vector<LayerInfo> ConvGluUnet::layer_infos() const {
  std::vector<LayerInfo> infos;
  infos.push_back({"time_mlp", impl_->temb.param_count(), 0, 1, 1, false});
  int i = 0;
  for (const auto& b : impl_->encoder) {
    infos.push_back({"enc" + std::to_string(i++), b.param_count(), b.macs_per_frame(), b.kernel,
                     b.dilation, true});
  }
  infos.push_back({"bottleneck", impl_->bottleneck.param_count(),
                   impl_->bottleneck.macs_per_frame(), impl_->bottleneck.kernel,
                   impl_->bottleneck.dilation, true});
  int j = 0;
  for (const auto& b : impl_->decoder) {
    infos.push_back({"dec" + std::to_string(j++), b.param_count(), b.macs_per_frame(), 1, 1,
                     true});
  }
  int k = 0;
  for (const auto& s : impl_->skips) {
    infos.push_back({"skip" + std::to_string(k++), s.param_count(), s.macs_per_frame(), 1, 1,
                     false});
  }
  infos.push_back({"in_skip", impl_->in_skip.param_count(), impl_->in_skip.macs_per_frame(),
                   1, 1, false});
  infos.push_back({"out_proj", impl_->out_proj.param_count(), impl_->out_proj.macs_per_frame(),
                   1, 1, true});
  return infos;
}

}  // namespace flowsr::models
