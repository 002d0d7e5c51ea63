#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flowsr/dsp/audio_buffer.hpp"
#include "flowsr/fm/sampler.hpp"
#include "flowsr/nn/layers.hpp"
#include "flowsr/util/kv_config.hpp"

namespace flowsr::models {

// One row of the complexity accounting. kernel_t/dilation_t feed the
// receptive-field chain for layers on the serial path.
struct LayerInfo {
  std::string name;
  int64_t params = 0;
  int64_t macs_per_frame = 0;
  int kernel_t = 1;
  int dilation_t = 1;
  bool on_serial_path = true;
};

// A frozen causal evaluation context at one sampler time t. step() advances
// it by exactly one frame; columns are packed [2F] (real parts then
// imaginary parts).
class BackboneStream {
 public:
  virtual ~BackboneStream() = default;
  virtual void step(const double* xt_col, const double* cond_col, double* v_col) = 0;
};

class Backbone {
 public:
  virtual ~Backbone() = default;

  virtual std::string kind() const = 0;
  virtual int bins() const = 0;

  // Training-time forward under a tape. xt and cond are [2F, L].
  virtual nn::Var forward_train(nn::Tape& tape, const nn::Tensor& xt, const nn::Tensor& cond,
                                double t) = 0;
  // Inference forward without gradient bookkeeping; must agree with
  // forward_train values exactly.
  virtual nn::Tensor forward(const nn::Tensor& xt, const nn::Tensor& cond, double t) const = 0;

  virtual std::unique_ptr<BackboneStream> open_stream(double t) const = 0;

  virtual std::vector<nn::Parameter*> parameters() = 0;
  virtual std::vector<LayerInfo> layer_infos() const = 0;
  virtual util::KvConfig config() const = 0;

  // Both shipped backbones are causal by construction; a stream refuses to
  // open over anything that reports otherwise.
  virtual bool causal_verified() const { return true; }

  int64_t param_count();
  fm::VelocityFieldFn velocity_field() const;
};

// Real/imaginary packing used at every network boundary: channel f holds the
// real part of bin f, channel F+f its imaginary part.
nn::Tensor pack_spectrogram(const dsp::ComplexSpectrogram& spec);
dsp::ComplexSpectrogram unpack_spectrogram(const nn::Tensor& t);
void pack_column(const std::complex<double>* col, int bins, double* out);
void unpack_column(const double* in, int bins, std::complex<double>* col);

}  // namespace flowsr::models
