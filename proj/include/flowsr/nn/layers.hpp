#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flowsr/nn/tape.hpp"
#include "flowsr/nn/tensor.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::nn {

// Kaiming-uniform fan-in init; biases start at zero, norm affine params at
// (1, 0), Fourier frequencies at N(0, scale^2). All draws go through the
// supplied Rng so a seed reproduces the model bit-exactly.
Tensor kaiming_uniform(std::vector<int> shape, int fan_in, util::Rng& rng);

class CausalConv1d {
 public:
  CausalConv1d() = default;
  CausalConv1d(const std::string& name, int in_ch, int out_ch, int kernel, int dilation,
               int groups, util::Rng& rng);

  Var forward(Tape& tape, Var x) const;
  Tensor apply(const Tensor& x) const;

  struct State {
    Tensor hist;  // [Cin, (K-1)*dilation]
  };
  State make_state() const;
  void step(State& s, const double* x_col, double* y_col) const;

  void collect(std::vector<Parameter*>& out);
  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }
  int kernel() const { return kernel_; }
  int dilation() const { return dilation_; }
  int groups() const { return groups_; }
  int64_t param_count() const { return weight_.value.size() + bias_.value.size(); }
  int64_t macs_per_frame() const {
    return static_cast<int64_t>(out_ch_) * (in_ch_ / groups_) * kernel_;
  }

 private:
  int in_ch_ = 0, out_ch_ = 0, kernel_ = 1, dilation_ = 1, groups_ = 1;
  Parameter weight_;  // [Cout, Cin/groups, K]
  Parameter bias_;    // [Cout]
};

// Depthwise (per-channel causal conv) followed by a 1x1 pointwise mix.
class DepthwiseSeparableConv1d {
 public:
  DepthwiseSeparableConv1d() = default;
  DepthwiseSeparableConv1d(const std::string& name, int in_ch, int out_ch, int kernel,
                           int dilation, util::Rng& rng);

  Var forward(Tape& tape, Var x) const;
  Tensor apply(const Tensor& x) const;

  struct State {
    CausalConv1d::State depthwise;
    Tensor mid;  // [Cin] scratch between the two convs
  };
  State make_state() const;
  void step(State& s, const double* x_col, double* y_col) const;

  void collect(std::vector<Parameter*>& out);
  const CausalConv1d& depthwise() const { return depthwise_; }
  const CausalConv1d& pointwise() const { return pointwise_; }
  int64_t param_count() const { return depthwise_.param_count() + pointwise_.param_count(); }
  int64_t macs_per_frame() const {
    return depthwise_.macs_per_frame() + pointwise_.macs_per_frame();
  }

 private:
  CausalConv1d depthwise_;
  CausalConv1d pointwise_;
};

class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in_dim, int out_dim, util::Rng& rng);

  Var forward(Tape& tape, Var x) const;
  Tensor apply(const Tensor& x) const;
  void collect(std::vector<Parameter*>& out);
  int64_t param_count() const { return weight_.value.size() + bias_.value.size(); }
  int out_dim() const { return weight_.value.ndim() > 0 ? weight_.value.dim(0) : 0; }

 private:
  Parameter weight_;  // [M, N]
  Parameter bias_;    // [M]
};

class CumulativeGroupNorm {
 public:
  CumulativeGroupNorm() = default;
  CumulativeGroupNorm(const std::string& name, int channels, int groups, double eps);

  Var forward(Tape& tape, Var x) const;
  Tensor apply(const Tensor& x) const;

  using State = ops::CumGnState;
  State make_state() const { return {}; }
  void step(State& s, int feat_per_chan, const double* x_col, double* y_col) const;

  void collect(std::vector<Parameter*>& out);
  int groups() const { return groups_; }
  int64_t param_count() const { return gamma_.value.size() + beta_.value.size(); }

 private:
  int groups_ = 1;
  double eps_ = 1e-6;
  Parameter gamma_;
  Parameter beta_;
};

class Conv2dCausal {
 public:
  Conv2dCausal() = default;
  // kernel_f must be odd when stride_f == 1 (same-size frequency padding);
  // for stride_f == 2 a kernel_f of 2 with no padding halves F.
  Conv2dCausal(const std::string& name, int in_ch, int out_ch, int kernel_f, int kernel_t,
               int dil_t, int stride_f, util::Rng& rng);

  Var forward(Tape& tape, Var x) const;
  Tensor apply(const Tensor& x) const;

  struct State {
    Tensor hist;  // [Cin, F, (KT-1)*dil_t]
  };
  State make_state(int f_in) const;
  void step(State& s, const double* x_col, double* y_col) const;

  void collect(std::vector<Parameter*>& out);
  int out_f(int f_in) const { return (f_in + 2 * pad_f_ - kernel_f_) / stride_f_ + 1; }
  int kernel_t() const { return kernel_t_; }
  int dil_t() const { return dil_t_; }
  int out_channels() const { return out_ch_; }
  int64_t param_count() const { return weight_.value.size() + bias_.value.size(); }
  int64_t macs_per_frame(int f_in) const {
    return static_cast<int64_t>(out_ch_) * in_ch_ * kernel_f_ * kernel_t_ * out_f(f_in);
  }

 private:
  int in_ch_ = 0, out_ch_ = 0, kernel_f_ = 1, kernel_t_ = 1, dil_t_ = 1, stride_f_ = 1,
      pad_f_ = 0;
  Parameter weight_;  // [Cout, Cin, KF, KT]
  Parameter bias_;
};

class FreqUpsample2d {
 public:
  FreqUpsample2d() = default;
  FreqUpsample2d(const std::string& name, int in_ch, int out_ch, util::Rng& rng);

  Var forward(Tape& tape, Var x) const;
  Tensor apply(const Tensor& x) const;
  void step(int f_in, const double* x_col, double* y_col) const;

  void collect(std::vector<Parameter*>& out);
  int out_channels() const { return out_ch_; }
  int64_t param_count() const { return weight_.value.size() + bias_.value.size(); }
  int64_t macs_per_frame(int f_in) const {
    return static_cast<int64_t>(out_ch_) * in_ch_ * 2 * f_in;
  }

 private:
  int in_ch_ = 0, out_ch_ = 0;
  Parameter weight_;  // [Cout, Cin, 2]
  Parameter bias_;
};

// embed(t) = [sin(2*pi*f_i*t) ..., cos(2*pi*f_i*t) ...] with frozen random
// frequencies; dim must be even.
class GaussianFourierEmbed {
 public:
  GaussianFourierEmbed() = default;
  GaussianFourierEmbed(int dim, double freq_scale, util::Rng& rng);

  Tensor embed(double t) const;
  int dim() const { return dim_; }
  const Tensor& frequencies() const { return freqs_; }

 private:
  int dim_ = 0;
  Tensor freqs_;  // [dim/2], non-trainable
};

// Fourier projection -> linear -> silu -> linear.
class TimeEmbedMlp {
 public:
  TimeEmbedMlp() = default;
  TimeEmbedMlp(const std::string& name, int fourier_dim, int out_dim, double freq_scale,
               util::Rng& rng);

  Var forward(Tape& tape, double t) const;
  Tensor apply(double t) const;
  void collect(std::vector<Parameter*>& out);
  int out_dim() const { return out_.out_dim(); }
  int64_t param_count() const { return hidden_.param_count() + out_.param_count(); }

 private:
  GaussianFourierEmbed fourier_;
  Linear hidden_;
  Linear out_;
};

// out = linear_path(x) .* tanh(gate(x)); the two branches are structurally
// identical convs. A per-block projection of the time embedding enters the
// linear path as a channel bias right after its conv.
Var glu_tanh(Tape& tape, Var linear_path, Var gate);

}  // namespace flowsr::nn
