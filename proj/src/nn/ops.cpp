#include "flowsr/nn/ops.hpp"

#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::nn {

bool all_finite(const Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) return false;
  }
  return true;
}

}  // namespace flowsr::nn

namespace flowsr::nn::ops {

namespace {

void check_conv1d(const Tensor& x, const Tensor& w, int dilation, int groups) {
  if (x.ndim() != 2 || w.ndim() != 3) throw ConfigError("causal_conv1d expects x[C,L], w[Co,Ci,K]");
  if (w.dim(2) < 1 || dilation < 1) throw ConfigError("causal_conv1d requires k >= 1 and dilation >= 1");
  if (groups < 1 || x.dim(0) != w.dim(1) * groups || w.dim(0) % groups != 0) {
    throw ConfigError("causal_conv1d channel/group mismatch: x " + x.shape_string());
  }
}

}  // namespace

void causal_conv1d_fwd(const Tensor& x, const Tensor& w, const Tensor* b, int dilation,
                       int groups, Tensor& y) {
  check_conv1d(x, w, dilation, groups);
  const int cin_g = w.dim(1), k = w.dim(2), cout = w.dim(0), l_len = x.dim(1);
  const int cout_g = cout / groups;
  y = Tensor({cout, l_len});
  const double* xd = x.data();
  const double* wd = w.data();
  double* yd = y.data();
  for (int co = 0; co < cout; ++co) {
    double* yrow = yd + static_cast<int64_t>(co) * l_len;
    const double bias = b ? (*b)[co] : 0.0;
    for (int l = 0; l < l_len; ++l) yrow[l] = bias;
    const int g = co / cout_g;
    for (int cig = 0; cig < cin_g; ++cig) {
      const double* xrow = xd + static_cast<int64_t>(g * cin_g + cig) * l_len;
      const double* wrow = wd + (static_cast<int64_t>(co) * cin_g + cig) * k;
      for (int kk = 0; kk < k; ++kk) {
        const int shift = (k - 1 - kk) * dilation;
        const double wv = wrow[kk];
        for (int l = shift; l < l_len; ++l) yrow[l] += wv * xrow[l - shift];
      }
    }
  }
}

void causal_conv1d_bwd(const Tensor& x, const Tensor& w, const Tensor& gy, int dilation,
                       int groups, Tensor* gx, Tensor* gw, Tensor* gb) {
  const int cin_g = w.dim(1), k = w.dim(2), cout = w.dim(0), l_len = x.dim(1);
  const int cout_g = cout / groups;
  const double* xd = x.data();
  const double* wd = w.data();
  const double* gyd = gy.data();
  for (int co = 0; co < cout; ++co) {
    const double* gyrow = gyd + static_cast<int64_t>(co) * l_len;
    if (gb) {
      double acc = 0.0;
      for (int l = 0; l < l_len; ++l) acc += gyrow[l];
      (*gb)[co] += acc;
    }
    const int g = co / cout_g;
    for (int cig = 0; cig < cin_g; ++cig) {
      const int ci = g * cin_g + cig;
      const double* xrow = xd + static_cast<int64_t>(ci) * l_len;
      double* gxrow = gx ? gx->data() + static_cast<int64_t>(ci) * l_len : nullptr;
      const double* wrow = wd + (static_cast<int64_t>(co) * cin_g + cig) * k;
      double* gwrow = gw ? gw->data() + (static_cast<int64_t>(co) * cin_g + cig) * k : nullptr;
      for (int kk = 0; kk < k; ++kk) {
        const int shift = (k - 1 - kk) * dilation;
        if (gwrow) {
          double acc = 0.0;
          for (int l = shift; l < l_len; ++l) acc += gyrow[l] * xrow[l - shift];
          gwrow[kk] += acc;
        }
        if (gxrow) {
          const double wv = wrow[kk];
          for (int l = shift; l < l_len; ++l) gxrow[l - shift] += wv * gyrow[l];
        }
      }
    }
  }
}

void causal_conv1d_step(const Tensor& w, const Tensor* b, int dilation, int groups,
                        Tensor& hist, const double* x_col, double* y_col) {
  const int cin_g = w.dim(1), k = w.dim(2), cout = w.dim(0);
  const int cout_g = cout / groups;
  const int h = (k - 1) * dilation;
  double* hd = hist.data();
  const double* wd = w.data();
  for (int co = 0; co < cout; ++co) {
    double acc = b ? (*b)[co] : 0.0;
    const int g = co / cout_g;
    for (int cig = 0; cig < cin_g; ++cig) {
      const int ci = g * cin_g + cig;
      const double* wrow = wd + (static_cast<int64_t>(co) * cin_g + cig) * k;
      for (int kk = 0; kk < k; ++kk) {
        const int shift = (k - 1 - kk) * dilation;
        const double xv = shift == 0 ? x_col[ci] : hd[static_cast<int64_t>(ci) * h + (h - shift)];
        acc += wrow[kk] * xv;
      }
    }
    y_col[co] = acc;
  }
  if (h > 0) {
    const int cin = cin_g * groups;
    for (int ci = 0; ci < cin; ++ci) {
      double* row = hd + static_cast<int64_t>(ci) * h;
      for (int j = 0; j + 1 < h; ++j) row[j] = row[j + 1];
      row[h - 1] = x_col[ci];
    }
  }
}

void conv2d_fwd(const Tensor& x, const Tensor& w, const Tensor* b, int dil_t, int stride_f,
                int pad_f, Tensor& y) {
  if (x.ndim() != 3 || w.ndim() != 4) throw ConfigError("conv2d expects x[C,F,L], w[Co,Ci,KF,KT]");
  const int cin = x.dim(0), f_in = x.dim(1), l_len = x.dim(2);
  const int cout = w.dim(0), kf = w.dim(2), kt = w.dim(3);
  if (w.dim(1) != cin) throw ConfigError("conv2d channel mismatch");
  const int f_out = (f_in + 2 * pad_f - kf) / stride_f + 1;
  y = Tensor({cout, f_out, l_len});
  const double* xd = x.data();
  const double* wd = w.data();
  double* yd = y.data();
  for (int co = 0; co < cout; ++co) {
    double* yplane = yd + static_cast<int64_t>(co) * f_out * l_len;
    const double bias = b ? (*b)[co] : 0.0;
    for (int64_t i = 0; i < static_cast<int64_t>(f_out) * l_len; ++i) yplane[i] = bias;
    for (int ci = 0; ci < cin; ++ci) {
      const double* xplane = xd + static_cast<int64_t>(ci) * f_in * l_len;
      for (int fk = 0; fk < kf; ++fk) {
        for (int tk = 0; tk < kt; ++tk) {
          const double wv = wd[((static_cast<int64_t>(co) * cin + ci) * kf + fk) * kt + tk];
          const int shift = (kt - 1 - tk) * dil_t;
          for (int fo = 0; fo < f_out; ++fo) {
            const int fi = fo * stride_f + fk - pad_f;
            if (fi < 0 || fi >= f_in) continue;
            const double* xrow = xplane + static_cast<int64_t>(fi) * l_len;
            double* yrow = yplane + static_cast<int64_t>(fo) * l_len;
            for (int l = shift; l < l_len; ++l) yrow[l] += wv * xrow[l - shift];
          }
        }
      }
    }
  }
}

void conv2d_bwd(const Tensor& x, const Tensor& w, const Tensor& gy, int dil_t, int stride_f,
                int pad_f, Tensor* gx, Tensor* gw, Tensor* gb) {
  const int cin = x.dim(0), f_in = x.dim(1), l_len = x.dim(2);
  const int cout = w.dim(0), kf = w.dim(2), kt = w.dim(3);
  const int f_out = gy.dim(1);
  const double* xd = x.data();
  const double* wd = w.data();
  const double* gyd = gy.data();
  for (int co = 0; co < cout; ++co) {
    const double* gyplane = gyd + static_cast<int64_t>(co) * f_out * l_len;
    if (gb) {
      double acc = 0.0;
      for (int64_t i = 0; i < static_cast<int64_t>(f_out) * l_len; ++i) acc += gyplane[i];
      (*gb)[co] += acc;
    }
    for (int ci = 0; ci < cin; ++ci) {
      const double* xplane = xd + static_cast<int64_t>(ci) * f_in * l_len;
      double* gxplane = gx ? gx->data() + static_cast<int64_t>(ci) * f_in * l_len : nullptr;
      for (int fk = 0; fk < kf; ++fk) {
        for (int tk = 0; tk < kt; ++tk) {
          const int64_t widx = ((static_cast<int64_t>(co) * cin + ci) * kf + fk) * kt + tk;
          const double wv = wd[widx];
          const int shift = (kt - 1 - tk) * dil_t;
          double wacc = 0.0;
          for (int fo = 0; fo < f_out; ++fo) {
            const int fi = fo * stride_f + fk - pad_f;
            if (fi < 0 || fi >= f_in) continue;
            const double* xrow = xplane + static_cast<int64_t>(fi) * l_len;
            const double* gyrow = gyplane + static_cast<int64_t>(fo) * l_len;
            if (gw) {
              for (int l = shift; l < l_len; ++l) wacc += gyrow[l] * xrow[l - shift];
            }
            if (gxplane) {
              double* gxrow = gxplane + static_cast<int64_t>(fi) * l_len;
              for (int l = shift; l < l_len; ++l) gxrow[l - shift] += wv * gyrow[l];
            }
          }
          if (gw) gw->data()[widx] += wacc;
        }
      }
    }
  }
}

void conv2d_step(const Tensor& w, const Tensor* b, int dil_t, int stride_f, int pad_f,
                 Tensor& hist, const double* x_col, double* y_col) {
  const int cin = w.dim(1), kf = w.dim(2), kt = w.dim(3), cout = w.dim(0);
  const int f_in = hist.dim(1);
  const int ht = (kt - 1) * dil_t;
  const int f_out = (f_in + 2 * pad_f - kf) / stride_f + 1;
  double* hd = hist.data();
  const double* wd = w.data();
  for (int co = 0; co < cout; ++co) {
    for (int fo = 0; fo < f_out; ++fo) {
      double acc = b ? (*b)[co] : 0.0;
      for (int ci = 0; ci < cin; ++ci) {
        for (int fk = 0; fk < kf; ++fk) {
          const int fi = fo * stride_f + fk - pad_f;
          if (fi < 0 || fi >= f_in) continue;
          for (int tk = 0; tk < kt; ++tk) {
            const int shift = (kt - 1 - tk) * dil_t;
            const double xv =
                shift == 0 ? x_col[static_cast<int64_t>(ci) * f_in + fi]
                           : hd[(static_cast<int64_t>(ci) * f_in + fi) * ht + (ht - shift)];
            acc += wd[((static_cast<int64_t>(co) * cin + ci) * kf + fk) * kt + tk] * xv;
          }
        }
      }
      y_col[static_cast<int64_t>(co) * f_out + fo] = acc;
    }
  }
  if (ht > 0) {
    for (int64_t cf = 0; cf < static_cast<int64_t>(cin) * f_in; ++cf) {
      double* row = hd + cf * ht;
      for (int j = 0; j + 1 < ht; ++j) row[j] = row[j + 1];
      row[ht - 1] = x_col[cf];
    }
  }
}

void freq_upsample_fwd(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& y) {
  const int cin = x.dim(0), f_in = x.dim(1), l_len = x.dim(2);
  const int cout = w.dim(0);
  if (w.dim(1) != cin || w.dim(2) != 2) throw ConfigError("freq_upsample expects w[Co,Ci,2]");
  y = Tensor({cout, 2 * f_in, l_len});
  double* yd = y.data();
  const double* xd = x.data();
  const double* wd = w.data();
  for (int co = 0; co < cout; ++co) {
    double* yplane = yd + static_cast<int64_t>(co) * 2 * f_in * l_len;
    const double bias = b ? (*b)[co] : 0.0;
    for (int64_t i = 0; i < static_cast<int64_t>(2) * f_in * l_len; ++i) yplane[i] = bias;
    for (int ci = 0; ci < cin; ++ci) {
      const double* xplane = xd + static_cast<int64_t>(ci) * f_in * l_len;
      for (int kf = 0; kf < 2; ++kf) {
        const double wv = wd[(static_cast<int64_t>(co) * cin + ci) * 2 + kf];
        for (int f = 0; f < f_in; ++f) {
          const double* xrow = xplane + static_cast<int64_t>(f) * l_len;
          double* yrow = yplane + static_cast<int64_t>(2 * f + kf) * l_len;
          for (int l = 0; l < l_len; ++l) yrow[l] += wv * xrow[l];
        }
      }
    }
  }
}

void freq_upsample_bwd(const Tensor& x, const Tensor& w, const Tensor& gy, Tensor* gx,
                       Tensor* gw, Tensor* gb) {
  const int cin = x.dim(0), f_in = x.dim(1), l_len = x.dim(2);
  const int cout = w.dim(0);
  const double* xd = x.data();
  const double* wd = w.data();
  const double* gyd = gy.data();
  for (int co = 0; co < cout; ++co) {
    const double* gyplane = gyd + static_cast<int64_t>(co) * 2 * f_in * l_len;
    if (gb) {
      double acc = 0.0;
      for (int64_t i = 0; i < static_cast<int64_t>(2) * f_in * l_len; ++i) acc += gyplane[i];
      (*gb)[co] += acc;
    }
    for (int ci = 0; ci < cin; ++ci) {
      const double* xplane = xd + static_cast<int64_t>(ci) * f_in * l_len;
      double* gxplane = gx ? gx->data() + static_cast<int64_t>(ci) * f_in * l_len : nullptr;
      for (int kf = 0; kf < 2; ++kf) {
        const int64_t widx = (static_cast<int64_t>(co) * cin + ci) * 2 + kf;
        const double wv = wd[widx];
        double wacc = 0.0;
        for (int f = 0; f < f_in; ++f) {
          const double* xrow = xplane + static_cast<int64_t>(f) * l_len;
          const double* gyrow = gyplane + static_cast<int64_t>(2 * f + kf) * l_len;
          if (gw) {
            for (int l = 0; l < l_len; ++l) wacc += gyrow[l] * xrow[l];
          }
          if (gxplane) {
            double* gxrow = gxplane + static_cast<int64_t>(f) * l_len;
            for (int l = 0; l < l_len; ++l) gxrow[l] += wv * gyrow[l];
          }
        }
        if (gw) gw->data()[widx] += wacc;
      }
    }
  }
}

void freq_upsample_step(const Tensor& w, const Tensor* b, int f_in, const double* x_col,
                        double* y_col) {
  const int cout = w.dim(0), cin = w.dim(1);
  const double* wd = w.data();
  for (int co = 0; co < cout; ++co) {
    const double bias = b ? (*b)[co] : 0.0;
    for (int f = 0; f < 2 * f_in; ++f) y_col[static_cast<int64_t>(co) * 2 * f_in + f] = bias;
    for (int ci = 0; ci < cin; ++ci) {
      for (int kf = 0; kf < 2; ++kf) {
        const double wv = wd[(static_cast<int64_t>(co) * cin + ci) * 2 + kf];
        for (int f = 0; f < f_in; ++f) {
          y_col[static_cast<int64_t>(co) * 2 * f_in + 2 * f + kf] +=
              wv * x_col[static_cast<int64_t>(ci) * f_in + f];
        }
      }
    }
  }
}

namespace {

struct GnDims {
  int channels;
  int feat;  // features per channel per frame (F for 3-d input, 1 for 2-d)
  int frames;
};

GnDims gn_dims(const Tensor& x) {
  if (x.ndim() == 2) return {x.dim(0), 1, x.dim(1)};
  if (x.ndim() == 3) return {x.dim(0), x.dim(1), x.dim(2)};
  throw ConfigError("cumulative_group_norm expects [C,L] or [C,F,L]");
}

}  // namespace

void cum_group_norm_fwd(const Tensor& x, const Tensor& gamma, const Tensor& beta, int groups,
                        double eps, Tensor& y, CumGnSaved* saved) {
  const auto d = gn_dims(x);
  if (groups < 1 || d.channels % groups != 0) {
    throw ConfigError("cumulative_group_norm: channels " + std::to_string(d.channels) +
                      " not divisible by groups " + std::to_string(groups));
  }
  const int cg = d.channels / groups;
  y = Tensor(x.shape());
  if (saved) {
    saved->mean = Tensor({groups, d.frames});
    saved->rstd = Tensor({groups, d.frames});
  }
  const double* xd = x.data();
  double* yd = y.data();
  for (int h = 0; h < groups; ++h) {
    double run1 = 0.0, run2 = 0.0;
    for (int l = 0; l < d.frames; ++l) {
      double s1 = 0.0, s2 = 0.0;
      for (int c = h * cg; c < (h + 1) * cg; ++c) {
        const double* base = xd + (static_cast<int64_t>(c) * d.feat) * d.frames;
        for (int m = 0; m < d.feat; ++m) {
          const double v = base[static_cast<int64_t>(m) * d.frames + l];
          s1 += v;
          s2 += v * v;
        }
      }
      run1 += s1;
      run2 += s2;
      const double n = static_cast<double>(cg) * d.feat * (l + 1);
      const double mean = run1 / n;
      double var = run2 / n - mean * mean;
      if (var < 0.0) var = 0.0;
      const double rstd = 1.0 / std::sqrt(var + eps);
      if (saved) {
        saved->mean[static_cast<int64_t>(h) * d.frames + l] = mean;
        saved->rstd[static_cast<int64_t>(h) * d.frames + l] = rstd;
      }
      for (int c = h * cg; c < (h + 1) * cg; ++c) {
        const double* base = xd + (static_cast<int64_t>(c) * d.feat) * d.frames;
        double* out = yd + (static_cast<int64_t>(c) * d.feat) * d.frames;
        const double g = gamma[c], bshift = beta[c];
        for (int m = 0; m < d.feat; ++m) {
          const int64_t idx = static_cast<int64_t>(m) * d.frames + l;
          out[idx] = g * (base[idx] - mean) * rstd + bshift;
        }
      }
    }
  }
}

void cum_group_norm_bwd(const Tensor& x, const Tensor& gamma, const CumGnSaved& saved,
                        const Tensor& gy, int groups, Tensor* gx, Tensor* ggamma,
                        Tensor* gbeta) {
  const auto d = gn_dims(x);
  const int cg = d.channels / groups;
  const double* xd = x.data();
  const double* gyd = gy.data();
  std::vector<double> a(d.frames), bsum(d.frames);
  std::vector<double> sfx1(d.frames), sfx3(d.frames), sfx4(d.frames);
  for (int h = 0; h < groups; ++h) {
    const double* mean = saved.mean.data() + static_cast<int64_t>(h) * d.frames;
    const double* rstd = saved.rstd.data() + static_cast<int64_t>(h) * d.frames;
    // Per-frame reductions of gy within the group.
    for (int l = 0; l < d.frames; ++l) a[l] = bsum[l] = 0.0;
    for (int c = h * cg; c < (h + 1) * cg; ++c) {
      const double g = gamma[c];
      const double* xbase = xd + (static_cast<int64_t>(c) * d.feat) * d.frames;
      const double* gybase = gyd + (static_cast<int64_t>(c) * d.feat) * d.frames;
      double gg = 0.0, gb = 0.0;
      for (int m = 0; m < d.feat; ++m) {
        const double* xr = xbase + static_cast<int64_t>(m) * d.frames;
        const double* gyr = gybase + static_cast<int64_t>(m) * d.frames;
        for (int l = 0; l < d.frames; ++l) {
          const double gyv = gyr[l];
          a[l] += gyv * g;
          bsum[l] += gyv * g * (xr[l] - mean[l]);
          gg += gyv * (xr[l] - mean[l]) * rstd[l];
          gb += gyv;
        }
      }
      if (ggamma) (*ggamma)[c] += gg;
      if (gbeta) (*gbeta)[c] += gb;
    }
    if (!gx) continue;
    // A frame's statistics feed every later frame; suffix-sum those paths.
    double acc1 = 0.0, acc3 = 0.0, acc4 = 0.0;
    for (int l = d.frames - 1; l >= 0; --l) {
      const double n = static_cast<double>(cg) * d.feat * (l + 1);
      const double r = rstd[l];
      acc1 += r * a[l] / n;
      const double r3b = r * r * r * bsum[l] / n;
      acc3 += r3b;
      acc4 += r3b * mean[l];
      sfx1[l] = acc1;
      sfx3[l] = acc3;
      sfx4[l] = acc4;
    }
    for (int c = h * cg; c < (h + 1) * cg; ++c) {
      const double g = gamma[c];
      const double* xbase = xd + (static_cast<int64_t>(c) * d.feat) * d.frames;
      const double* gybase = gyd + (static_cast<int64_t>(c) * d.feat) * d.frames;
      double* gxbase = gx->data() + (static_cast<int64_t>(c) * d.feat) * d.frames;
      for (int m = 0; m < d.feat; ++m) {
        const int64_t off = static_cast<int64_t>(m) * d.frames;
        for (int l = 0; l < d.frames; ++l) {
          gxbase[off + l] +=
              gybase[off + l] * g * rstd[l] - sfx1[l] - xbase[off + l] * sfx3[l] + sfx4[l];
        }
      }
    }
  }
}

void cum_group_norm_step(const Tensor& gamma, const Tensor& beta, int groups, double eps,
                         CumGnState& state, int feat_per_chan, const double* x_col,
                         double* y_col) {
  const int channels = static_cast<int>(gamma.size());
  const int cg = channels / groups;
  if (state.sum.empty()) {
    state.sum.assign(groups, 0.0);
    state.sumsq.assign(groups, 0.0);
    state.frames = 0;
  }
  state.frames += 1;
  for (int h = 0; h < groups; ++h) {
    double s1 = 0.0, s2 = 0.0;
    for (int c = h * cg; c < (h + 1) * cg; ++c) {
      for (int m = 0; m < feat_per_chan; ++m) {
        const double v = x_col[static_cast<int64_t>(c) * feat_per_chan + m];
        s1 += v;
        s2 += v * v;
      }
    }
    state.sum[h] += s1;
    state.sumsq[h] += s2;
    const double n = static_cast<double>(cg) * feat_per_chan * state.frames;
    const double mean = state.sum[h] / n;
    double var = state.sumsq[h] / n - mean * mean;
    if (var < 0.0) var = 0.0;
    const double rstd = 1.0 / std::sqrt(var + eps);
    for (int c = h * cg; c < (h + 1) * cg; ++c) {
      for (int m = 0; m < feat_per_chan; ++m) {
        const int64_t idx = static_cast<int64_t>(c) * feat_per_chan + m;
        y_col[idx] = gamma[c] * (x_col[idx] - mean) * rstd + beta[c];
      }
    }
  }
}

}  // namespace flowsr::nn::ops
