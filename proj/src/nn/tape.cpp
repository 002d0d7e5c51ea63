#include "flowsr/nn/tape.hpp"

#include <cassert>
#include <cmath>
#include <memory>

#include "flowsr/util/error.hpp"

namespace flowsr::nn {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ConfigError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                      b.shape_string());
  }
}

}  // namespace

int Tape::push(Tensor value, std::initializer_list<Var> parents,
               std::function<void(Tape&, int)> back) {
#ifndef NDEBUG
  assert(all_finite(value) && "non-finite value produced by a tape op");
#endif
  bool needs = false;
  for (Var p : parents) {
    if (p.valid() && nodes_[p.id].needs) needs = true;
  }
  nodes_.push_back(Node{std::move(value), Tensor(), nullptr, needs, std::move(back)});
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::input(Tensor x) { return {push(std::move(x), {}, nullptr)}; }

Var Tape::param(Parameter& p) {
  const int id = push(p.value, {}, nullptr);
  nodes_[id].bound = &p;
  nodes_[id].needs = true;
  return {id};
}

Var Tape::add(Var a, Var b) {
  check_same_shape(val(a), val(b), "add");
  Tensor out = val(a);
  const Tensor& bv = val(b);
  for (int64_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return {push(std::move(out), {a, b}, [a, b](Tape& t, int self) {
    const Tensor& gy = t.grad({self});
    if (t.needs_grad(a)) {
      Tensor& ga = t.grad(a);
      for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
    }
    if (t.needs_grad(b)) {
      Tensor& gb = t.grad(b);
      for (int64_t i = 0; i < gy.size(); ++i) gb[i] += gy[i];
    }
  })};
}

Var Tape::mul(Var a, Var b) {
  check_same_shape(val(a), val(b), "mul");
  Tensor out = val(a);
  const Tensor& bv = val(b);
  for (int64_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return {push(std::move(out), {a, b}, [a, b](Tape& t, int self) {
    const Tensor& gy = t.grad({self});
    if (t.needs_grad(a)) {
      const Tensor& bv2 = t.val(b);
      Tensor& ga = t.grad(a);
      for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * bv2[i];
    }
    if (t.needs_grad(b)) {
      const Tensor& av = t.val(a);
      Tensor& gb = t.grad(b);
      for (int64_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * av[i];
    }
  })};
}

Var Tape::scale(Var a, double s) {
  Tensor out = val(a);
  for (int64_t i = 0; i < out.size(); ++i) out[i] *= s;
  return {push(std::move(out), {a}, [a, s](Tape& t, int self) {
    if (!t.needs_grad(a)) return;
    const Tensor& gy = t.grad({self});
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < gy.size(); ++i) ga[i] += s * gy[i];
  })};
}

Var Tape::tanh_op(Var a) {
  Tensor out = val(a);
  for (int64_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return {push(std::move(out), {a}, [a](Tape& t, int self) {
    if (!t.needs_grad(a)) return;
    const Tensor& gy = t.grad({self});
    const Tensor& y = t.val({self});
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * (1.0 - y[i] * y[i]);
  })};
}

Var Tape::silu(Var a) {
  Tensor out = val(a);
  for (int64_t i = 0; i < out.size(); ++i) {
    const double sig = 1.0 / (1.0 + std::exp(-out[i]));
    out[i] *= sig;
  }
  return {push(std::move(out), {a}, [a](Tape& t, int self) {
    if (!t.needs_grad(a)) return;
    const Tensor& gy = t.grad({self});
    const Tensor& x = t.val(a);
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < gy.size(); ++i) {
      const double sig = 1.0 / (1.0 + std::exp(-x[i]));
      ga[i] += gy[i] * sig * (1.0 + x[i] * (1.0 - sig));
    }
  })};
}

Var Tape::add_channel_bias(Var x, Var bias) {
  const Tensor& xv = val(x);
  const Tensor& bv = val(bias);
  if (bv.ndim() != 1 || bv.dim(0) != xv.dim(0)) {
    throw ConfigError("add_channel_bias: bias " + bv.shape_string() + " does not match x " +
                      xv.shape_string());
  }
  const int channels = xv.dim(0);
  const int64_t per_chan = xv.size() / channels;
  Tensor out = xv;
  for (int c = 0; c < channels; ++c) {
    double* row = out.data() + c * per_chan;
    for (int64_t i = 0; i < per_chan; ++i) row[i] += bv[c];
  }
  return {push(std::move(out), {x, bias}, [x, bias, channels, per_chan](Tape& t, int self) {
    const Tensor& gy = t.grad({self});
    const bool nx = t.needs_grad(x);
    const bool nb = t.needs_grad(bias);
    for (int c = 0; c < channels; ++c) {
      const double* gyrow = gy.data() + c * per_chan;
      if (nx) {
        double* gxrow = t.grad(x).data() + c * per_chan;
        for (int64_t i = 0; i < per_chan; ++i) gxrow[i] += gyrow[i];
      }
      if (nb) {
        double acc = 0.0;
        for (int64_t i = 0; i < per_chan; ++i) acc += gyrow[i];
        t.grad(bias)[c] += acc;
      }
    }
  })};
}

Var Tape::concat_channels(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.ndim() != bv.ndim()) throw ConfigError("concat_channels: rank mismatch");
  for (int i = 1; i < av.ndim(); ++i) {
    if (av.dim(i) != bv.dim(i)) throw ConfigError("concat_channels: trailing dims differ");
  }
  std::vector<int> shape = av.shape();
  shape[0] += bv.dim(0);
  Tensor out(shape);
  std::copy(av.data(), av.data() + av.size(), out.data());
  std::copy(bv.data(), bv.data() + bv.size(), out.data() + av.size());
  const int64_t asize = av.size();
  return {push(std::move(out), {a, b}, [a, b, asize](Tape& t, int self) {
    const Tensor& gy = t.grad({self});
    if (t.needs_grad(a)) {
      Tensor& ga = t.grad(a);
      for (int64_t i = 0; i < asize; ++i) ga[i] += gy[i];
    }
    if (t.needs_grad(b)) {
      Tensor& gb = t.grad(b);
      for (int64_t i = asize; i < gy.size(); ++i) gb[i - asize] += gy[i];
    }
  })};
}

Var Tape::slice_channels(Var x, int from, int count) {
  const Tensor& xv = val(x);
  const int64_t per_chan = xv.size() / xv.dim(0);
  std::vector<int> shape = xv.shape();
  shape[0] = count;
  Tensor out(shape);
  std::copy(xv.data() + from * per_chan, xv.data() + (from + count) * per_chan, out.data());
  return {push(std::move(out), {x}, [x, from, per_chan](Tape& t, int self) {
    if (!t.needs_grad(x)) return;
    const Tensor& gy = t.grad({self});
    double* dst = t.grad(x).data() + from * per_chan;
    for (int64_t i = 0; i < gy.size(); ++i) dst[i] += gy[i];
  })};
}

Var Tape::causal_conv1d(Var x, Var w, Var b, int dilation, int groups) {
  Tensor out;
  ops::causal_conv1d_fwd(val(x), val(w), b.valid() ? &val(b) : nullptr, dilation, groups, out);
  return {push(std::move(out), {x, w, b}, [x, w, b, dilation, groups](Tape& t, int self) {
    ops::causal_conv1d_bwd(t.val(x), t.val(w), t.grad({self}), dilation, groups,
                           t.needs_grad(x) ? &t.grad(x) : nullptr,
                           t.needs_grad(w) ? &t.grad(w) : nullptr,
                           b.valid() && t.needs_grad(b) ? &t.grad(b) : nullptr);
  })};
}

Var Tape::conv2d(Var x, Var w, Var b, int dil_t, int stride_f, int pad_f) {
  Tensor out;
  ops::conv2d_fwd(val(x), val(w), b.valid() ? &val(b) : nullptr, dil_t, stride_f, pad_f, out);
  return {push(std::move(out), {x, w, b},
               [x, w, b, dil_t, stride_f, pad_f](Tape& t, int self) {
    ops::conv2d_bwd(t.val(x), t.val(w), t.grad({self}), dil_t, stride_f, pad_f,
                    t.needs_grad(x) ? &t.grad(x) : nullptr,
                    t.needs_grad(w) ? &t.grad(w) : nullptr,
                    b.valid() && t.needs_grad(b) ? &t.grad(b) : nullptr);
  })};
}

Var Tape::freq_upsample(Var x, Var w, Var b) {
  Tensor out;
  ops::freq_upsample_fwd(val(x), val(w), b.valid() ? &val(b) : nullptr, out);
  return {push(std::move(out), {x, w, b}, [x, w, b](Tape& t, int self) {
    ops::freq_upsample_bwd(t.val(x), t.val(w), t.grad({self}),
                           t.needs_grad(x) ? &t.grad(x) : nullptr,
                           t.needs_grad(w) ? &t.grad(w) : nullptr,
                           b.valid() && t.needs_grad(b) ? &t.grad(b) : nullptr);
  })};
}

Var Tape::cum_group_norm(Var x, Var gamma, Var beta, int groups, double eps) {
  Tensor out;
  auto saved = std::make_shared<ops::CumGnSaved>();
  ops::cum_group_norm_fwd(val(x), val(gamma), val(beta), groups, eps, out, saved.get());
  return {push(std::move(out), {x, gamma, beta},
               [x, gamma, beta, groups, saved](Tape& t, int self) {
    ops::cum_group_norm_bwd(t.val(x), t.val(gamma), *saved, t.grad({self}), groups,
                            t.needs_grad(x) ? &t.grad(x) : nullptr,
                            t.needs_grad(gamma) ? &t.grad(gamma) : nullptr,
                            t.needs_grad(beta) ? &t.grad(beta) : nullptr);
  })};
}

Var Tape::linear(Var x, Var w, Var b) {
  const Tensor& xv = val(x);
  const Tensor& wv = val(w);
  if (xv.ndim() != 1 || wv.ndim() != 2 || wv.dim(1) != xv.dim(0)) {
    throw ConfigError("linear: w " + wv.shape_string() + " incompatible with x " +
                      xv.shape_string());
  }
  const int m = wv.dim(0), n = wv.dim(1);
  Tensor out({m});
  for (int i = 0; i < m; ++i) {
    double acc = b.valid() ? val(b)[i] : 0.0;
    const double* wrow = wv.data() + static_cast<int64_t>(i) * n;
    for (int j = 0; j < n; ++j) acc += wrow[j] * xv[j];
    out[i] = acc;
  }
  return {push(std::move(out), {x, w, b}, [x, w, b, m, n](Tape& t, int self) {
    const Tensor& gy = t.grad({self});
    const Tensor& xv2 = t.val(x);
    const Tensor& wv2 = t.val(w);
    const bool nx = t.needs_grad(x);
    const bool nw = t.needs_grad(w);
    for (int i = 0; i < m; ++i) {
      const double g = gy[i];
      const double* wrow = wv2.data() + static_cast<int64_t>(i) * n;
      if (nx) {
        Tensor& gx = t.grad(x);
        for (int j = 0; j < n; ++j) gx[j] += wrow[j] * g;
      }
      if (nw) {
        double* gwrow = t.grad(w).data() + static_cast<int64_t>(i) * n;
        for (int j = 0; j < n; ++j) gwrow[j] += xv2[j] * g;
      }
      if (b.valid() && t.needs_grad(b)) t.grad(b)[i] += g;
    }
  })};
}

Var Tape::pad_freq(Var x, int pad_hi) {
  const Tensor& xv = val(x);
  if (xv.ndim() != 3) throw ConfigError("pad_freq expects [C,F,L]");
  const int c = xv.dim(0), f = xv.dim(1), l = xv.dim(2);
  Tensor out({c, f + pad_hi, l});
  for (int ci = 0; ci < c; ++ci) {
    std::copy(xv.data() + static_cast<int64_t>(ci) * f * l,
              xv.data() + static_cast<int64_t>(ci + 1) * f * l,
              out.data() + static_cast<int64_t>(ci) * (f + pad_hi) * l);
  }
  return {push(std::move(out), {x}, [x, c, f, l, pad_hi](Tape& t, int self) {
    if (!t.needs_grad(x)) return;
    const Tensor& gy = t.grad({self});
    Tensor& gx = t.grad(x);
    for (int ci = 0; ci < c; ++ci) {
      const double* src = gy.data() + static_cast<int64_t>(ci) * (f + pad_hi) * l;
      double* dst = gx.data() + static_cast<int64_t>(ci) * f * l;
      for (int64_t i = 0; i < static_cast<int64_t>(f) * l; ++i) dst[i] += src[i];
    }
  })};
}

Var Tape::crop_freq(Var x, int bins) {
  const Tensor& xv = val(x);
  if (xv.ndim() != 3) throw ConfigError("crop_freq expects [C,F,L]");
  const int c = xv.dim(0), f = xv.dim(1), l = xv.dim(2);
  Tensor out({c, bins, l});
  for (int ci = 0; ci < c; ++ci) {
    std::copy(xv.data() + static_cast<int64_t>(ci) * f * l,
              xv.data() + static_cast<int64_t>(ci) * f * l + static_cast<int64_t>(bins) * l,
              out.data() + static_cast<int64_t>(ci) * bins * l);
  }
  return {push(std::move(out), {x}, [x, c, f, l, bins](Tape& t, int self) {
    if (!t.needs_grad(x)) return;
    const Tensor& gy = t.grad({self});
    Tensor& gx = t.grad(x);
    for (int ci = 0; ci < c; ++ci) {
      const double* src = gy.data() + static_cast<int64_t>(ci) * bins * l;
      double* dst = gx.data() + static_cast<int64_t>(ci) * f * l;
      for (int64_t i = 0; i < static_cast<int64_t>(bins) * l; ++i) dst[i] += src[i];
    }
  })};
}

Var Tape::reshape(Var x, std::vector<int> shape) {
  const Tensor& xv = val(x);
  if (Tensor::count(shape) != xv.size()) {
    throw ConfigError("reshape: element count mismatch for " + xv.shape_string());
  }
  Tensor out(shape);
  std::copy(xv.data(), xv.data() + xv.size(), out.data());
  return {push(std::move(out), {x}, [x](Tape& t, int self) {
    if (!t.needs_grad(x)) return;
    const Tensor& gy = t.grad({self});
    Tensor& gx = t.grad(x);
    for (int64_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
  })};
}

Var Tape::sum(Var a) {
  double acc = 0.0;
  const Tensor& av = val(a);
  for (int64_t i = 0; i < av.size(); ++i) acc += av[i];
  return {push(Tensor::scalar(acc), {a}, [a](Tape& t, int self) {
    if (!t.needs_grad(a)) return;
    const double g = t.grad({self})[0];
    Tensor& ga = t.grad(a);
    for (int64_t i = 0; i < ga.size(); ++i) ga[i] += g;
  })};
}

Var Tape::mse(Var pred, Tensor target) {
  const Tensor& pv = val(pred);
  check_same_shape(pv, target, "mse");
  const int64_t n = pv.size();
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = pv[i] - target[i];
    acc += d * d;
  }
  auto tgt = std::make_shared<Tensor>(std::move(target));
  return {push(Tensor::scalar(acc / static_cast<double>(n)), {pred},
               [pred, tgt, n](Tape& t, int self) {
    if (!t.needs_grad(pred)) return;
    const double g = t.grad({self})[0] * 2.0 / static_cast<double>(n);
    const Tensor& pv2 = t.val(pred);
    Tensor& gp = t.grad(pred);
    for (int64_t i = 0; i < n; ++i) gp[i] += g * (pv2[i] - (*tgt)[i]);
  })};
}

void Tape::backward(Var loss) {
  for (auto& [param, grad] : backward_take_param_grads(loss)) {
    Tensor& pg = param->grad;
    for (int64_t i = 0; i < pg.size(); ++i) pg[i] += grad[i];
  }
}

std::vector<std::pair<Parameter*, Tensor>> Tape::backward_take_param_grads(Var loss) {
  if (!loss.valid() || nodes_.empty()) throw ConfigError("backward called without a forward pass");
  if (val(loss).size() != 1) throw ConfigError("backward requires a scalar loss");
  for (auto& node : nodes_) {
    if (node.needs) node.grad = Tensor(node.value.shape());
  }
  if (nodes_[loss.id].grad.size() == 0) nodes_[loss.id].grad = Tensor(val(loss).shape());
  nodes_[loss.id].grad[0] = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    if (nodes_[i].back && nodes_[i].grad.size() > 0) nodes_[i].back(*this, i);
  }
  std::vector<std::pair<Parameter*, Tensor>> out;
  for (auto& node : nodes_) {
    if (node.bound) out.emplace_back(node.bound, std::move(node.grad));
  }
  return out;
}

}  // namespace flowsr::nn
