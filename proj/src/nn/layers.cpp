#include "flowsr/nn/layers.hpp"

#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::nn {

Tensor kaiming_uniform(std::vector<int> shape, int fan_in, util::Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / fan_in);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

CausalConv1d::CausalConv1d(const std::string& name, int in_ch, int out_ch, int kernel,
                           int dilation, int groups, util::Rng& rng)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), dilation_(dilation), groups_(groups) {
  if (kernel < 1 || dilation < 1) throw ConfigError(name + ": kernel and dilation must be >= 1");
  if (in_ch % groups != 0 || out_ch % groups != 0) {
    throw ConfigError(name + ": channels not divisible by groups");
  }
  const int fan_in = (in_ch / groups) * kernel;
  weight_ = Parameter(name + ".w", kaiming_uniform({out_ch, in_ch / groups, kernel}, fan_in, rng));
  bias_ = Parameter(name + ".b", Tensor({out_ch}));
}

Var CausalConv1d::forward(Tape& tape, Var x) const {
  const Var w = tape.param(const_cast<Parameter&>(weight_));
  const Var b = tape.param(const_cast<Parameter&>(bias_));
  return tape.causal_conv1d(x, w, b, dilation_, groups_);
}

Tensor CausalConv1d::apply(const Tensor& x) const {
  Tensor y;
  ops::causal_conv1d_fwd(x, weight_.value, &bias_.value, dilation_, groups_, y);
  return y;
}

CausalConv1d::State CausalConv1d::make_state() const {
  return {Tensor({in_ch_, (kernel_ - 1) * dilation_})};
}

void CausalConv1d::step(State& s, const double* x_col, double* y_col) const {
  ops::causal_conv1d_step(weight_.value, &bias_.value, dilation_, groups_, s.hist, x_col, y_col);
}

void CausalConv1d::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

DepthwiseSeparableConv1d::DepthwiseSeparableConv1d(const std::string& name, int in_ch,
                                                   int out_ch, int kernel, int dilation,
                                                   util::Rng& rng)
    : depthwise_(name + ".dw", in_ch, in_ch, kernel, dilation, in_ch, rng),
      pointwise_(name + ".pw", in_ch, out_ch, 1, 1, 1, rng) {}

Var DepthwiseSeparableConv1d::forward(Tape& tape, Var x) const {
  return pointwise_.forward(tape, depthwise_.forward(tape, x));
}

Tensor DepthwiseSeparableConv1d::apply(const Tensor& x) const {
  return pointwise_.apply(depthwise_.apply(x));
}

DepthwiseSeparableConv1d::State DepthwiseSeparableConv1d::make_state() const {
  return {depthwise_.make_state(), Tensor({depthwise_.out_channels()})};
}

void DepthwiseSeparableConv1d::step(State& s, const double* x_col, double* y_col) const {
  depthwise_.step(s.depthwise, x_col, s.mid.data());
  CausalConv1d::State none{Tensor({0, 0})};
  pointwise_.step(none, s.mid.data(), y_col);
}

void DepthwiseSeparableConv1d::collect(std::vector<Parameter*>& out) {
  depthwise_.collect(out);
  pointwise_.collect(out);
}

Linear::Linear(const std::string& name, int in_dim, int out_dim, util::Rng& rng) {
  weight_ = Parameter(name + ".w", kaiming_uniform({out_dim, in_dim}, in_dim, rng));
  bias_ = Parameter(name + ".b", Tensor({out_dim}));
}

Var Linear::forward(Tape& tape, Var x) const {
  const Var w = tape.param(const_cast<Parameter&>(weight_));
  const Var b = tape.param(const_cast<Parameter&>(bias_));
  return tape.linear(x, w, b);
}

Tensor Linear::apply(const Tensor& x) const {
  const int m = weight_.value.dim(0), n = weight_.value.dim(1);
  Tensor y({m});
  for (int i = 0; i < m; ++i) {
    double acc = bias_.value[i];
    const double* wrow = weight_.value.data() + static_cast<int64_t>(i) * n;
    for (int j = 0; j < n; ++j) acc += wrow[j] * x[j];
    y[i] = acc;
  }
  return y;
}

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

CumulativeGroupNorm::CumulativeGroupNorm(const std::string& name, int channels, int groups,
                                         double eps)
    : groups_(groups), eps_(eps) {
  if (channels % groups != 0) {
    throw ConfigError(name + ": channels " + std::to_string(channels) +
                      " not divisible by groups " + std::to_string(groups));
  }
  Tensor g({channels});
  g.fill(1.0);
  gamma_ = Parameter(name + ".gamma", std::move(g));
  beta_ = Parameter(name + ".beta", Tensor({channels}));
}

Var CumulativeGroupNorm::forward(Tape& tape, Var x) const {
  const Var g = tape.param(const_cast<Parameter&>(gamma_));
  const Var b = tape.param(const_cast<Parameter&>(beta_));
  return tape.cum_group_norm(x, g, b, groups_, eps_);
}

Tensor CumulativeGroupNorm::apply(const Tensor& x) const {
  Tensor y;
  ops::cum_group_norm_fwd(x, gamma_.value, beta_.value, groups_, eps_, y, nullptr);
  return y;
}

void CumulativeGroupNorm::step(State& s, int feat_per_chan, const double* x_col,
                               double* y_col) const {
  ops::cum_group_norm_step(gamma_.value, beta_.value, groups_, eps_, s, feat_per_chan, x_col,
                           y_col);
}

void CumulativeGroupNorm::collect(std::vector<Parameter*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

Conv2dCausal::Conv2dCausal(const std::string& name, int in_ch, int out_ch, int kernel_f,
                           int kernel_t, int dil_t, int stride_f, util::Rng& rng)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_f_(kernel_f),
      kernel_t_(kernel_t),
      dil_t_(dil_t),
      stride_f_(stride_f) {
  if (stride_f == 1) {
    if (kernel_f % 2 == 0) throw ConfigError(name + ": same-size conv needs odd kernel_f");
    pad_f_ = (kernel_f - 1) / 2;
  } else {
    pad_f_ = 0;
  }
  const int fan_in = in_ch * kernel_f * kernel_t;
  weight_ =
      Parameter(name + ".w", kaiming_uniform({out_ch, in_ch, kernel_f, kernel_t}, fan_in, rng));
  bias_ = Parameter(name + ".b", Tensor({out_ch}));
}

Var Conv2dCausal::forward(Tape& tape, Var x) const {
  const Var w = tape.param(const_cast<Parameter&>(weight_));
  const Var b = tape.param(const_cast<Parameter&>(bias_));
  return tape.conv2d(x, w, b, dil_t_, stride_f_, pad_f_);
}

Tensor Conv2dCausal::apply(const Tensor& x) const {
  Tensor y;
  ops::conv2d_fwd(x, weight_.value, &bias_.value, dil_t_, stride_f_, pad_f_, y);
  return y;
}

Conv2dCausal::State Conv2dCausal::make_state(int f_in) const {
  return {Tensor({in_ch_, f_in, (kernel_t_ - 1) * dil_t_})};
}

void Conv2dCausal::step(State& s, const double* x_col, double* y_col) const {
  ops::conv2d_step(weight_.value, &bias_.value, dil_t_, stride_f_, pad_f_, s.hist, x_col, y_col);
}

void Conv2dCausal::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

FreqUpsample2d::FreqUpsample2d(const std::string& name, int in_ch, int out_ch, util::Rng& rng)
    : in_ch_(in_ch), out_ch_(out_ch) {
  weight_ = Parameter(name + ".w", kaiming_uniform({out_ch, in_ch, 2}, in_ch * 2, rng));
  bias_ = Parameter(name + ".b", Tensor({out_ch}));
}

Var FreqUpsample2d::forward(Tape& tape, Var x) const {
  const Var w = tape.param(const_cast<Parameter&>(weight_));
  const Var b = tape.param(const_cast<Parameter&>(bias_));
  return tape.freq_upsample(x, w, b);
}

Tensor FreqUpsample2d::apply(const Tensor& x) const {
  Tensor y;
  ops::freq_upsample_fwd(x, weight_.value, &bias_.value, y);
  return y;
}

void FreqUpsample2d::step(int f_in, const double* x_col, double* y_col) const {
  ops::freq_upsample_step(weight_.value, &bias_.value, f_in, x_col, y_col);
}

void FreqUpsample2d::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

GaussianFourierEmbed::GaussianFourierEmbed(int dim, double freq_scale, util::Rng& rng)
    : dim_(dim) {
  if (dim < 2 || dim % 2 != 0) {
    throw ConfigError("gaussian fourier embedding dim must be even, got " + std::to_string(dim));
  }
  freqs_ = Tensor({dim / 2});
  for (int64_t i = 0; i < freqs_.size(); ++i) freqs_[i] = rng.gaussian(0.0, freq_scale);
}

Tensor GaussianFourierEmbed::embed(double t) const {
  Tensor out({dim_});
  const int half = dim_ / 2;
  for (int i = 0; i < half; ++i) {
    const double phase = 2.0 * M_PI * freqs_[i] * t;
    out[i] = std::sin(phase);
    out[half + i] = std::cos(phase);
  }
  return out;
}

TimeEmbedMlp::TimeEmbedMlp(const std::string& name, int fourier_dim, int out_dim,
                           double freq_scale, util::Rng& rng)
    : fourier_(fourier_dim, freq_scale, rng),
      hidden_(name + ".fc1", fourier_dim, out_dim, rng),
      out_(name + ".fc2", out_dim, out_dim, rng) {}

Var TimeEmbedMlp::forward(Tape& tape, double t) const {
  Var h = hidden_.forward(tape, tape.input(fourier_.embed(t)));
  return out_.forward(tape, tape.silu(h));
}

Tensor TimeEmbedMlp::apply(double t) const {
  Tensor h = hidden_.apply(fourier_.embed(t));
  for (int64_t i = 0; i < h.size(); ++i) h[i] *= 1.0 / (1.0 + std::exp(-h[i]));
  return out_.apply(h);
}

void TimeEmbedMlp::collect(std::vector<Parameter*>& out) {
  hidden_.collect(out);
  out_.collect(out);
}

Var glu_tanh(Tape& tape, Var linear_path, Var gate) {
  return tape.mul(linear_path, tape.tanh_op(gate));
}

}  // namespace flowsr::nn
