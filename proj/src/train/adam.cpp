#include "flowsr/train/adam.hpp"

#include <cmath>

#include "flowsr/util/error.hpp"

namespace flowsr::train {

Adam::Adam(const std::vector<nn::Parameter*>& params, const AdamConfig& cfg) : cfg_(cfg) {
  for (const auto* p : params) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step(const std::vector<nn::Parameter*>& params) {
  if (params.size() != m_.size()) throw ConfigError("adam: parameter list changed size");
  step_ += 1;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params.size(); ++i) {
    nn::Parameter& p = *params[i];
    nn::Tensor& m = m_[i];
    nn::Tensor& v = v_[i];
    for (int64_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p.value[j] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

void Adam::restore(int64_t step_count, std::vector<nn::Tensor> m, std::vector<nn::Tensor> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw DataError("adam: restored moment count does not match parameters");
  }
  step_ = step_count;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace flowsr::train
