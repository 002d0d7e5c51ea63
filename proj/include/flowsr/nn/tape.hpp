#pragma once

#include <functional>
#include <vector>

#include "flowsr/nn/ops.hpp"
#include "flowsr/nn/tensor.hpp"

namespace flowsr::nn {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Records every primitive execution in order; backward replays the records in
// exact reverse order, accumulating gradients additively. One tape serves one
// forward/backward pair and is then discarded.
class Tape {
 public:
  Var input(Tensor x);          // constant leaf
  Var param(Parameter& p);      // trainable leaf; backward adds into p.grad

  const Tensor& val(Var v) const { return nodes_[v.id].value; }
  Tensor& grad(Var v) { return nodes_[v.id].grad; }
  // A node needs a gradient only if some trainable leaf sits below it;
  // backward skips pullbacks into constant subgraphs (e.g. network inputs).
  bool needs_grad(Var v) const { return nodes_[v.id].needs; }

  Var add(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var tanh_op(Var a);
  Var silu(Var a);
  Var add_channel_bias(Var x, Var bias);
  Var concat_channels(Var a, Var b);
  Var slice_channels(Var x, int from, int count);
  Var causal_conv1d(Var x, Var w, Var b, int dilation, int groups);
  Var conv2d(Var x, Var w, Var b, int dil_t, int stride_f, int pad_f);
  Var freq_upsample(Var x, Var w, Var b);
  Var cum_group_norm(Var x, Var gamma, Var beta, int groups, double eps);
  Var linear(Var x, Var w, Var b);
  Var pad_freq(Var x, int pad_hi);
  Var crop_freq(Var x, int bins);
  Var reshape(Var x, std::vector<int> shape);  // same element count and order
  Var sum(Var a);                   // scalar
  Var mse(Var pred, Tensor target);  // scalar mean-square error

  // Seeds d(loss)/d(loss) = 1, walks the records backwards, then adds each
  // leaf gradient into its bound Parameter. Requires a scalar loss node.
  void backward(Var loss);

  // As backward(), but hands the leaf gradients back instead of accumulating
  // them, so independent tapes can run on worker threads and be merged in a
  // fixed order (bit-identical to sequential accumulation).
  std::vector<std::pair<Parameter*, Tensor>> backward_take_param_grads(Var loss);

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* bound = nullptr;
    bool needs = false;
    std::function<void(Tape&, int)> back;  // (tape, own id)
  };

  int push(Tensor value, std::initializer_list<Var> parents,
           std::function<void(Tape&, int)> back);
  std::vector<Node> nodes_;
};

}  // namespace flowsr::nn
