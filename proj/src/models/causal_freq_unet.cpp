#include "flowsr/models/causal_freq_unet.hpp"

#include <algorithm>
#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::models {

using nn::Tape;
using nn::Tensor;
using nn::Var;

void CausalFreqUnetConfig::validate() const {
  if (bins < 1) throw ConfigError("causal_freq_unet: bins must be positive");
  if (num_scales < 1) throw ConfigError("causal_freq_unet: num_scales must be >= 1");
  if (static_cast<int>(widths.size()) != num_scales) {
    throw ConfigError("causal_freq_unet: widths must list one channel count per scale");
  }
  for (int w : widths) {
    if (w < 1) throw ConfigError("causal_freq_unet: widths must be positive");
    if (w % gn_groups != 0) {
      throw ConfigError("causal_freq_unet: width " + std::to_string(w) +
                        " not divisible by gn_groups " + std::to_string(gn_groups));
    }
  }
  if (kernel_f % 2 == 0) throw ConfigError("causal_freq_unet: kernel_f must be odd");
  if (kernel_t < 1) throw ConfigError("causal_freq_unet: kernel_t must be >= 1");
  const int stride_total = 1 << num_scales;
  if (padded_bins() % stride_total != 0) {
    throw ConfigError("causal_freq_unet: " + std::to_string(bins) + " bins (padded to " +
                      std::to_string(padded_bins()) + ") not divisible by 2^" +
                      std::to_string(num_scales));
  }
}

int CausalFreqUnetConfig::padded_bins() const {
  const int stride_total = 1 << num_scales;
  return ((bins + stride_total - 1) / stride_total) * stride_total;
}

util::KvConfig CausalFreqUnetConfig::to_config() const {
  util::KvConfig kv;
  kv.set("model.kind", std::string("causal_freq_unet"));
  kv.set("model.bins", static_cast<int64_t>(bins));
  kv.set("model.num_scales", static_cast<int64_t>(num_scales));
  std::string w;
  for (size_t i = 0; i < widths.size(); ++i) {
    if (i) w += ",";
    w += std::to_string(widths[i]);
  }
  kv.set("model.widths", w);
  kv.set("model.gn_groups", static_cast<int64_t>(gn_groups));
  kv.set("model.kernel_f", static_cast<int64_t>(kernel_f));
  kv.set("model.kernel_t", static_cast<int64_t>(kernel_t));
  kv.set("model.time_embed_dim", static_cast<int64_t>(time_embed_dim));
  kv.set("model.fourier_scale", fourier_scale);
  kv.set("model.gn_eps", gn_eps);
  kv.set("model.init_seed", static_cast<int64_t>(init_seed));
  return kv;
}

CausalFreqUnetConfig CausalFreqUnetConfig::from_config(const util::KvConfig& kv) {
  CausalFreqUnetConfig cfg;
  cfg.bins = static_cast<int>(kv.get_int_or("model.bins", cfg.bins));
  cfg.num_scales = static_cast<int>(kv.get_int_or("model.num_scales", cfg.num_scales));
  if (kv.has("model.widths")) {
    cfg.widths.clear();
    for (const auto& part : util::split(kv.get_string("model.widths"), ',')) {
      cfg.widths.push_back(std::stoi(part));
    }
  }
  cfg.gn_groups = static_cast<int>(kv.get_int_or("model.gn_groups", cfg.gn_groups));
  cfg.kernel_f = static_cast<int>(kv.get_int_or("model.kernel_f", cfg.kernel_f));
  cfg.kernel_t = static_cast<int>(kv.get_int_or("model.kernel_t", cfg.kernel_t));
  cfg.time_embed_dim = static_cast<int>(kv.get_int_or("model.time_embed_dim", 64));
  cfg.fourier_scale = kv.get_double_or("model.fourier_scale", 16.0);
  cfg.gn_eps = kv.get_double_or("model.gn_eps", 1e-6);
  cfg.init_seed = static_cast<uint64_t>(kv.get_int_or("model.init_seed", 0xf5eed));
  return cfg;
}

namespace {

void silu_inplace(Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i) t[i] *= 1.0 / (1.0 + std::exp(-t[i]));
}

void silu_inplace(double* p, int64_t n) {
  for (int64_t i = 0; i < n; ++i) p[i] *= 1.0 / (1.0 + std::exp(-p[i]));
}

// conv -> +temb -> norm -> silu -> conv -> norm -> silu, with a 1x1 shortcut
// when the channel count changes.
struct ResBlock {
  int in_ch = 0, out_ch = 0, freq = 0;  // freq: bins at this scale
  nn::Conv2dCausal conv1, conv2, shortcut;
  nn::CumulativeGroupNorm gn1, gn2;
  nn::Linear temb_proj;
  bool has_shortcut = false;

  ResBlock() = default;
  ResBlock(const std::string& name, int in, int out, int f, const CausalFreqUnetConfig& cfg,
           util::Rng& rng)
      : in_ch(in), out_ch(out), freq(f) {
    conv1 = nn::Conv2dCausal(name + ".conv1", in, out, cfg.kernel_f, cfg.kernel_t, 1, 1, rng);
    conv2 = nn::Conv2dCausal(name + ".conv2", out, out, cfg.kernel_f, cfg.kernel_t, 1, 1, rng);
    gn1 = nn::CumulativeGroupNorm(name + ".gn1", out, cfg.gn_groups, cfg.gn_eps);
    gn2 = nn::CumulativeGroupNorm(name + ".gn2", out, cfg.gn_groups, cfg.gn_eps);
    temb_proj = nn::Linear(name + ".temb", cfg.time_embed_dim, out, rng);
    has_shortcut = in != out;
    if (has_shortcut) {
      shortcut = nn::Conv2dCausal(name + ".shortcut", in, out, 1, 1, 1, 1, rng);
    }
  }

  Var forward(Tape& tape, Var x, Var emb) const {
    Var h = conv1.forward(tape, x);
    h = tape.add_channel_bias(h, temb_proj.forward(tape, emb));
    h = tape.silu(gn1.forward(tape, h));
    h = conv2.forward(tape, h);
    h = tape.silu(gn2.forward(tape, h));
    return tape.add(h, has_shortcut ? shortcut.forward(tape, x) : x);
  }

  Tensor apply(const Tensor& x, const Tensor& emb) const {
    Tensor h = conv1.apply(x);
    const Tensor bias = temb_proj.apply(emb);
    const int64_t per_chan = h.size() / out_ch;
    for (int c = 0; c < out_ch; ++c) {
      double* row = h.data() + c * per_chan;
      for (int64_t i = 0; i < per_chan; ++i) row[i] += bias[c];
    }
    h = gn1.apply(h);
    silu_inplace(h);
    h = conv2.apply(h);
    h = gn2.apply(h);
    silu_inplace(h);
    if (has_shortcut) {
      const Tensor s = shortcut.apply(x);
      for (int64_t i = 0; i < h.size(); ++i) h[i] += s[i];
    } else {
      for (int64_t i = 0; i < h.size(); ++i) h[i] += x[i];
    }
    return h;
  }

  struct State {
    nn::Conv2dCausal::State conv1_hist, conv2_hist, shortcut_hist;
    nn::CumulativeGroupNorm::State gn1_state, gn2_state;
    Tensor bias;      // [out]
    Tensor a, b;      // [out * freq] scratch columns
  };

  State make_state(const Tensor& emb) const {
    State s;
    s.conv1_hist = conv1.make_state(freq);
    s.conv2_hist = conv2.make_state(freq);
    if (has_shortcut) s.shortcut_hist = shortcut.make_state(freq);
    s.bias = temb_proj.apply(emb);
    s.a = Tensor({static_cast<int>(out_ch) * freq});
    s.b = Tensor({static_cast<int>(out_ch) * freq});
    return s;
  }

  void step(State& s, const double* x_col, double* y_col) const {
    conv1.step(s.conv1_hist, x_col, s.a.data());
    for (int c = 0; c < out_ch; ++c) {
      for (int f = 0; f < freq; ++f) s.a[static_cast<int64_t>(c) * freq + f] += s.bias[c];
    }
    gn1.step(s.gn1_state, freq, s.a.data(), s.b.data());
    silu_inplace(s.b.data(), s.b.size());
    conv2.step(s.conv2_hist, s.b.data(), s.a.data());
    gn2.step(s.gn2_state, freq, s.a.data(), s.b.data());
    silu_inplace(s.b.data(), s.b.size());
    if (has_shortcut) {
      shortcut.step(s.shortcut_hist, x_col, y_col);
      for (int64_t i = 0; i < s.b.size(); ++i) y_col[i] = s.b[i] + y_col[i];
    } else {
      for (int64_t i = 0; i < s.b.size(); ++i) y_col[i] = s.b[i] + x_col[i];
    }
  }

  void collect(std::vector<nn::Parameter*>& out) {
    conv1.collect(out);
    conv2.collect(out);
    gn1.collect(out);
    gn2.collect(out);
    temb_proj.collect(out);
    if (has_shortcut) shortcut.collect(out);
  }

  void layer_infos(const std::string& name, int kt, std::vector<LayerInfo>& out) const {
    out.push_back({name + ".conv1", conv1.param_count(), conv1.macs_per_frame(freq), kt, 1,
                   true});
    out.push_back({name + ".gn1+temb", gn1.param_count() + temb_proj.param_count(), 0, 1, 1,
                   true});
    out.push_back({name + ".conv2", conv2.param_count(), conv2.macs_per_frame(freq), kt, 1,
                   true});
    out.push_back({name + ".gn2", gn2.param_count(), 0, 1, 1, true});
    if (has_shortcut) {
      out.push_back({name + ".shortcut", shortcut.param_count(), shortcut.macs_per_frame(freq),
                     1, 1, false});
    }
  }
};

}  // namespace

struct CausalFreqUnet::Impl {
  nn::TimeEmbedMlp temb;
  nn::Conv2dCausal in_proj;
  std::vector<ResBlock> enc;
  std::vector<nn::Conv2dCausal> downs;
  ResBlock bottleneck;
  std::vector<nn::FreqUpsample2d> ups;        // indexed by scale
  std::vector<nn::Conv2dCausal> skip_projs;   // 1x1 per scale
  std::vector<ResBlock> dec;                  // indexed by scale
  nn::Conv2dCausal out_proj;
  std::vector<int> scale_bins;  // padded F at each scale
};

CausalFreqUnet::CausalFreqUnet(const CausalFreqUnetConfig& cfg) : cfg_(cfg), impl_(new Impl) {
  cfg_.validate();
  util::Rng rng(cfg_.init_seed);
  const auto& w = cfg_.widths;
  const int scales = cfg_.num_scales;
  const int f_pad = cfg_.padded_bins();

  impl_->temb = nn::TimeEmbedMlp("temb", cfg_.time_embed_dim, cfg_.time_embed_dim,
                                 cfg_.fourier_scale, rng);
  impl_->in_proj = nn::Conv2dCausal("in_proj", 4, w[0], 1, 1, 1, 1, rng);
  for (int s = 0; s < scales; ++s) {
    impl_->scale_bins.push_back(f_pad >> s);
    impl_->enc.emplace_back("enc" + std::to_string(s), w[s], w[s], f_pad >> s, cfg_, rng);
    const int next = s + 1 < scales ? w[s + 1] : w[scales - 1];
    impl_->downs.emplace_back("down" + std::to_string(s), w[s], next, 2, 1, 1, 2, rng);
  }
  impl_->bottleneck =
      ResBlock("bottleneck", w[scales - 1], w[scales - 1], f_pad >> scales, cfg_, rng);
  impl_->ups.resize(scales);
  impl_->skip_projs.resize(scales);
  impl_->dec.resize(scales);
  for (int s = scales - 1; s >= 0; --s) {
    const int from = s + 1 < scales ? w[s + 1] : w[scales - 1];
    impl_->ups[s] = nn::FreqUpsample2d("up" + std::to_string(s), from, w[s], rng);
    impl_->skip_projs[s] =
        nn::Conv2dCausal("skip" + std::to_string(s), w[s], w[s], 1, 1, 1, 1, rng);
    impl_->dec[s] = ResBlock("dec" + std::to_string(s), w[s], w[s], f_pad >> s, cfg_, rng);
  }
  impl_->out_proj = nn::Conv2dCausal("out_proj", w[0], 2, 1, 1, 1, 1, rng);
  // zero-initialized head, as in the 1-d net
  std::vector<nn::Parameter*> head;
  impl_->out_proj.collect(head);
  for (auto* p : head) p->value.fill(0.0);
}

CausalFreqUnet::~CausalFreqUnet() = default;

Var CausalFreqUnet::forward_train(Tape& tape, const Tensor& xt, const Tensor& cond, double t) {
  const int l_len = xt.dim(1);
  const int f_pad = cfg_.padded_bins();
  // [2F, L] packed real/imag is bitwise a [2, F, L] tensor.
  Var x = tape.concat_channels(tape.reshape(tape.input(xt), {2, cfg_.bins, l_len}),
                               tape.reshape(tape.input(cond), {2, cfg_.bins, l_len}));
  x = tape.pad_freq(x, f_pad - cfg_.bins);
  Var emb = impl_->temb.forward(tape, t);

  x = impl_->in_proj.forward(tape, x);
  std::vector<Var> skips;
  for (int s = 0; s < cfg_.num_scales; ++s) {
    x = impl_->enc[s].forward(tape, x, emb);
    skips.push_back(x);
    x = impl_->downs[s].forward(tape, x);
  }
  x = impl_->bottleneck.forward(tape, x, emb);
  for (int s = cfg_.num_scales - 1; s >= 0; --s) {
    x = impl_->ups[s].forward(tape, x);
    x = tape.add(x, impl_->skip_projs[s].forward(tape, skips[s]));
    x = impl_->dec[s].forward(tape, x, emb);
  }
  x = impl_->out_proj.forward(tape, x);
  x = tape.crop_freq(x, cfg_.bins);
  return tape.reshape(x, {2 * cfg_.bins, l_len});
}

Tensor CausalFreqUnet::forward(const Tensor& xt, const Tensor& cond, double t) const {
  const int l_len = xt.dim(1);
  const int f_pad = cfg_.padded_bins();
  Tensor x({4, f_pad, l_len});
  // channels: xt re, xt im, cond re, cond im; frequency zero-padded at the top
  for (int c = 0; c < 2; ++c) {
    for (int f = 0; f < cfg_.bins; ++f) {
      const double* src_x = xt.data() + (static_cast<int64_t>(c) * cfg_.bins + f) * l_len;
      const double* src_c = cond.data() + (static_cast<int64_t>(c) * cfg_.bins + f) * l_len;
      std::copy(src_x, src_x + l_len,
                x.data() + (static_cast<int64_t>(c) * f_pad + f) * l_len);
      std::copy(src_c, src_c + l_len,
                x.data() + (static_cast<int64_t>(c + 2) * f_pad + f) * l_len);
    }
  }
  const Tensor emb = impl_->temb.apply(t);
  Tensor cur = impl_->in_proj.apply(x);
  std::vector<Tensor> skips;
  for (int s = 0; s < cfg_.num_scales; ++s) {
    cur = impl_->enc[s].apply(cur, emb);
    skips.push_back(cur);
    cur = impl_->downs[s].apply(cur);
  }
  cur = impl_->bottleneck.apply(cur, emb);
  for (int s = cfg_.num_scales - 1; s >= 0; --s) {
    cur = impl_->ups[s].apply(cur);
    const Tensor sk = impl_->skip_projs[s].apply(skips[s]);
    for (int64_t i = 0; i < cur.size(); ++i) cur[i] += sk[i];
    cur = impl_->dec[s].apply(cur, emb);
  }
  cur = impl_->out_proj.apply(cur);
  // crop frequency padding and flatten back to [2F, L]
  Tensor out({2 * cfg_.bins, l_len});
  for (int c = 0; c < 2; ++c) {
    for (int f = 0; f < cfg_.bins; ++f) {
      const double* src = cur.data() + (static_cast<int64_t>(c) * f_pad + f) * l_len;
      std::copy(src, src + l_len,
                out.data() + (static_cast<int64_t>(c) * cfg_.bins + f) * l_len);
    }
  }
  return out;
}

namespace {

struct FreqUnetStream final : public BackboneStream {
  const CausalFreqUnet::Impl* net = nullptr;
  int bins = 0, f_pad = 0, scales = 0;
  nn::Conv2dCausal::State in_proj_hist, out_proj_hist;
  std::vector<ResBlock::State> enc_states, dec_states;
  ResBlock::State bottleneck_state;
  std::vector<nn::Conv2dCausal::State> down_hists, skip_hists;
  Tensor in_col;
  std::vector<Tensor> enc_cols;   // encoder output per scale
  std::vector<Tensor> work;       // per-scale scratch [w[s] * F_s]
  Tensor bott_col, up_col, out_col;

  void step(const double* xt_col, const double* cond_col, double* v_col) override {
    in_col.fill(0.0);
    for (int f = 0; f < bins; ++f) {
      in_col[0 * f_pad + f] = xt_col[f];
      in_col[1 * f_pad + f] = xt_col[bins + f];
      in_col[2 * f_pad + f] = cond_col[f];
      in_col[3 * f_pad + f] = cond_col[bins + f];
    }
    net->in_proj.step(in_proj_hist, in_col.data(), work[0].data());
    for (int s = 0; s < scales; ++s) {
      net->enc[s].step(enc_states[s], work[s].data(), enc_cols[s].data());
      Tensor& next = s + 1 < scales ? work[s + 1] : bott_col;
      net->downs[s].step(down_hists[s], enc_cols[s].data(), next.data());
    }
    net->bottleneck.step(bottleneck_state, bott_col.data(), up_col.data());
    // up_col currently holds the representation entering scale s+1's up
    for (int s = scales - 1; s >= 0; --s) {
      const Tensor& src = s == scales - 1 ? up_col : work[s + 1];
      net->ups[s].step(net->scale_bins[s] / 2, src.data(), work[s].data());
      net->skip_projs[s].step(skip_hists[s], enc_cols[s].data(), out_col.data());
      for (int64_t i = 0; i < work[s].size(); ++i) work[s][i] += out_col[i];
      net->dec[s].step(dec_states[s], work[s].data(), work[s].data());
    }
    net->out_proj.step(out_proj_hist, work[0].data(), out_col.data());
    for (int f = 0; f < bins; ++f) {
      v_col[f] = out_col[0 * f_pad + f];
      v_col[bins + f] = out_col[1 * f_pad + f];
    }
  }
};

}  // namespace

std::unique_ptr<BackboneStream> CausalFreqUnet::open_stream(double t) const {
  auto s = std::make_unique<FreqUnetStream>();
  s->net = impl_.get();
  s->bins = cfg_.bins;
  s->f_pad = cfg_.padded_bins();
  s->scales = cfg_.num_scales;
  const Tensor emb = impl_->temb.apply(t);
  s->in_proj_hist = impl_->in_proj.make_state(s->f_pad);
  s->out_proj_hist = impl_->out_proj.make_state(s->f_pad);
  int64_t max_col = 4 * s->f_pad;
  for (int sc = 0; sc < cfg_.num_scales; ++sc) {
    const int f_s = impl_->scale_bins[sc];
    s->enc_states.push_back(impl_->enc[sc].make_state(emb));
    s->dec_states.push_back(impl_->dec[sc].make_state(emb));
    s->down_hists.push_back(impl_->downs[sc].make_state(f_s));
    s->skip_hists.push_back(impl_->skip_projs[sc].make_state(f_s));
    s->enc_cols.emplace_back(Tensor({cfg_.widths[sc] * f_s}));
    s->work.emplace_back(Tensor({std::max(cfg_.widths[sc] * f_s, 4 * s->f_pad)}));
    max_col = std::max<int64_t>(max_col, static_cast<int64_t>(cfg_.widths[sc]) * f_s);
  }
  s->bottleneck_state = impl_->bottleneck.make_state(emb);
  const int f_bott = s->f_pad >> cfg_.num_scales;
  s->bott_col = Tensor({cfg_.widths.back() * f_bott});
  s->up_col = Tensor({cfg_.widths.back() * f_bott});
  s->in_col = Tensor({4 * s->f_pad});
  s->out_col = Tensor({static_cast<int>(max_col)});
  return s;
}

std::vector<nn::Parameter*> CausalFreqUnet::parameters() {
  std::vector<nn::Parameter*> out;
  impl_->temb.collect(out);
  impl_->in_proj.collect(out);
  for (auto& b : impl_->enc) b.collect(out);
  for (auto& d : impl_->downs) d.collect(out);
  impl_->bottleneck.collect(out);
  for (auto& u : impl_->ups) u.collect(out);
  for (auto& p : impl_->skip_projs) p.collect(out);
  for (auto& b : impl_->dec) b.collect(out);
  impl_->out_proj.collect(out);
  return out;
}

std::vector<LayerInfo> CausalFreqUnet::layer_infos() const {
  std::vector<LayerInfo> infos;
  const int f_pad = cfg_.padded_bins();
  infos.push_back({"time_mlp", impl_->temb.param_count(), 0, 1, 1, false});
  infos.push_back({"in_proj", impl_->in_proj.param_count(), impl_->in_proj.macs_per_frame(f_pad),
                   1, 1, true});
  for (int s = 0; s < cfg_.num_scales; ++s) {
    const int f_s = impl_->scale_bins[s];
    impl_->enc[s].layer_infos("enc" + std::to_string(s), cfg_.kernel_t, infos);
    infos.push_back({"down" + std::to_string(s), impl_->downs[s].param_count(),
                     impl_->downs[s].macs_per_frame(f_s), 1, 1, true});
  }
  impl_->bottleneck.layer_infos("bottleneck", cfg_.kernel_t, infos);
  for (int s = cfg_.num_scales - 1; s >= 0; --s) {
    const int f_s = impl_->scale_bins[s];
    infos.push_back({"up" + std::to_string(s), impl_->ups[s].param_count(),
                     impl_->ups[s].macs_per_frame(f_s / 2), 1, 1, true});
    infos.push_back({"skip" + std::to_string(s), impl_->skip_projs[s].param_count(),
                     impl_->skip_projs[s].macs_per_frame(f_s), 1, 1, false});
    impl_->dec[s].layer_infos("dec" + std::to_string(s), cfg_.kernel_t, infos);
  }
  infos.push_back({"out_proj", impl_->out_proj.param_count(),
                   impl_->out_proj.macs_per_frame(f_pad), 1, 1, true});
  return infos;
}

}  // namespace flowsr::models
