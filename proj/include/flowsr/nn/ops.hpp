#pragma once

#include "flowsr/nn/tensor.hpp"

namespace flowsr::nn::ops {

// Stateless forward/backward kernels shared by the tape (training), the
// no-grad offline path, and the per-frame streaming path. x is [C, L] for 1-d
// ops and [C, F, L] for 2-d ops; weights are [Cout, Cin/groups, K] and
// [Cout, Cin, KF, KT]. All temporal kernels are causal: output frame l reads
// input frames <= l only, via an implicit left zero-pad of (K-1)*dilation.

void causal_conv1d_fwd(const Tensor& x, const Tensor& w, const Tensor* b, int dilation,
                       int groups, Tensor& y);
void causal_conv1d_bwd(const Tensor& x, const Tensor& w, const Tensor& gy, int dilation,
                       int groups, Tensor* gx, Tensor* gw, Tensor* gb);

// Single-frame step; hist is [Cin, (K-1)*dilation] ordered oldest..newest and
// is updated in place.
void causal_conv1d_step(const Tensor& w, const Tensor* b, int dilation, int groups,
                        Tensor& hist, const double* x_col, double* y_col);

// 2-d conv over [C, F, L]: causal in time (dilation dil_t), symmetric
// zero-padding pad_f and stride stride_f along frequency.
void conv2d_fwd(const Tensor& x, const Tensor& w, const Tensor* b, int dil_t, int stride_f,
                int pad_f, Tensor& y);
void conv2d_bwd(const Tensor& x, const Tensor& w, const Tensor& gy, int dil_t, int stride_f,
                int pad_f, Tensor* gx, Tensor* gw, Tensor* gb);
// hist is [Cin, F, (KT-1)*dil_t]; x_col/y_col are [Cin, F] / [Cout, F_out].
void conv2d_step(const Tensor& w, const Tensor* b, int dil_t, int stride_f, int pad_f,
                 Tensor& hist, const double* x_col, double* y_col);

// Frequency upsampling by 2 (transposed stride-2 conv, kernel 2, temporal
// kernel 1). w is [Cout, Cin, 2].
void freq_upsample_fwd(const Tensor& x, const Tensor& w, const Tensor* b, Tensor& y);
void freq_upsample_bwd(const Tensor& x, const Tensor& w, const Tensor& gy, Tensor* gx,
                       Tensor* gw, Tensor* gb);
void freq_upsample_step(const Tensor& w, const Tensor* b, int f_in, const double* x_col,
                        double* y_col);

// Cumulative group norm over [C, L] or [C, F, L]: frame l is normalized with
// statistics over (channels in group) x (frequency) x (frames 0..l).
struct CumGnSaved {
  Tensor mean;   // [groups, L]
  Tensor rstd;   // [groups, L]
};
void cum_group_norm_fwd(const Tensor& x, const Tensor& gamma, const Tensor& beta, int groups,
                        double eps, Tensor& y, CumGnSaved* saved);
void cum_group_norm_bwd(const Tensor& x, const Tensor& gamma, const CumGnSaved& saved,
                        const Tensor& gy, int groups, Tensor* gx, Tensor* ggamma,
                        Tensor* gbeta);
// Streaming state: running sum/sumsq per group plus the frame counter.
struct CumGnState {
  std::vector<double> sum;
  std::vector<double> sumsq;
  int64_t frames = 0;
};
void cum_group_norm_step(const Tensor& gamma, const Tensor& beta, int groups, double eps,
                         CumGnState& state, int feat_per_chan, const double* x_col,
                         double* y_col);

}  // namespace flowsr::nn::ops
