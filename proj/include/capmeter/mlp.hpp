#pragma once

// From-scratch feed-forward binary classifier: parameter initialization,
// forward pass, binary cross-entropy loss with analytic backprop gradient,
// and thresholded prediction. All arithmetic is double precision; every
// operation is a pure function of its inputs.
//
// Flattened parameter layout, layer by layer: the layer's weight matrix in
// unit-major (row-major) order, then its bias vector. Total length is
// param_count(arch).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "capmeter/architecture.hpp"
#include "capmeter/dataset.hpp"
#include "capmeter/rng.hpp"

namespace capmeter {

/// A dataset together with a binary labeling of its points.
struct LabeledSet {
  Dataset data;
  std::vector<std::uint8_t> labels;  // values in {0,1}, one per point

  void validate() const {
    if (labels.size() != static_cast<std::size_t>(data.n))
      throw std::invalid_argument("LabeledSet: labels length must equal point count");
    for (auto b : labels)
      if (b > 1) throw std::invalid_argument("LabeledSet: labels must be 0 or 1");
  }
};

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::logistic: return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity: return z;
  }
  return z;
}

/// Derivative as a function of the pre-activation; relu'(0) is defined as 0.
inline double activate_deriv(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::logistic: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

/// Per-layer weights and biases with a bit-exact flat view.
struct Params {
  std::vector<std::vector<double>> weights;  // [layer] row-major units x fan_in
  std::vector<std::vector<double>> biases;   // [layer] one per unit

  std::vector<double> flatten() const {
    std::vector<double> flat;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      flat.insert(flat.end(), weights[l].begin(), weights[l].end());
      flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
  }

  static Params unflatten(const ArchitectureSpec& arch, std::span<const double> flat) {
    if (static_cast<int>(flat.size()) != param_count(arch))
      throw std::invalid_argument("Params::unflatten: length must equal param_count(arch)");
    Params p;
    const std::vector<int> w = arch.layer_widths();
    std::size_t pos = 0;
    for (std::size_t l = 1; l < w.size(); ++l) {
      const std::size_t nw = static_cast<std::size_t>(w[l]) * (w[l - 1]);
      p.weights.emplace_back(flat.begin() + pos, flat.begin() + pos + nw);
      pos += nw;
      p.biases.emplace_back(flat.begin() + pos, flat.begin() + pos + w[l]);
      pos += static_cast<std::size_t>(w[l]);
    }
    return p;
  }
};

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
/// deterministic in (arch, seed).
inline Params init_params(const ArchitectureSpec& arch, std::uint64_t seed) {
  arch.validate();
  rng::CounterRng gen(seed);
  Params p;
  const std::vector<int> w = arch.layer_widths();
  for (std::size_t l = 1; l < w.size(); ++l) {
    const int fan_in = w[l - 1];
    const int fan_out = w[l];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> weights(static_cast<std::size_t>(fan_out) * fan_in);
    for (auto& x : weights) x = gen.next_uniform(-limit, limit);
    p.weights.push_back(std::move(weights));
    p.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return p;
}

namespace detail {
// log(1 + e^z), overflow-safe.
inline double softplus(double z) {
  return (z > 0.0 ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}
}  // namespace detail

/// Reusable forward/backward workspace for one architecture. Buffers are
/// reused across calls, so an instance is not safe for concurrent use; each
/// worker owns its own (construction is cheap).
class MlpEval {
 public:
  explicit MlpEval(ArchitectureSpec arch)
      : arch_(std::move(arch)), widths_(arch_.layer_widths()), dim_(param_count(arch_)) {
    acts_.resize(widths_.size());
    pre_.resize(widths_.size());
    delta_.resize(widths_.size());
    for (std::size_t l = 0; l < widths_.size(); ++l) {
      acts_[l].resize(static_cast<std::size_t>(widths_[l]));
      pre_[l].resize(static_cast<std::size_t>(widths_[l]));
      delta_[l].resize(static_cast<std::size_t>(widths_[l]));
    }
  }

  int dim() const noexcept { return dim_; }
  const ArchitectureSpec& arch() const noexcept { return arch_; }

  /// Output-unit pre-activation for a single point.
  double logit(std::span<const double> flat, std::span<const double> x) {
    forward(flat, x);
    return pre_.back()[0];
  }

  /// 1 iff the logistic output exceeds 0.5; a pre-activation of exactly 0
  /// maps to class 0.
  int predict(std::span<const double> flat, std::span<const double> x) {
    return logit(flat, x) > 0.0 ? 1 : 0;
  }

  /// Mean binary cross-entropy of the logistic output plus l2/2 * ||W||^2
  /// (biases excluded from the penalty). Writes the exact analytic gradient
  /// with respect to the flat parameter vector into grad.
  double loss_and_grad(std::span<const double> flat, const LabeledSet& set, double l2,
                       std::span<double> grad) {
    if (static_cast<int>(flat.size()) != dim_ || grad.size() != flat.size())
      throw std::invalid_argument("loss_and_grad: parameter length mismatch");
    set.validate();
    if (l2 < 0.0) throw std::invalid_argument("loss_and_grad: l2 must be >= 0");
    const int n = set.data.n;
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / n;

    for (int i = 0; i < n; ++i) {
      forward(flat, set.data.row(i));
      const double z = pre_.back()[0];
      const double y = set.labels[i];
      loss += inv_n * (detail::softplus(z) - y * z);
      delta_.back()[0] = inv_n * (1.0 / (1.0 + std::exp(-z)) - y);
      backward(flat, grad);
    }

    if (l2 > 0.0) {
      std::size_t pos = 0;
      for (std::size_t l = 1; l < widths_.size(); ++l) {
        const std::size_t nw = static_cast<std::size_t>(widths_[l]) * widths_[l - 1];
        for (std::size_t j = 0; j < nw; ++j) {
          loss += 0.5 * l2 * flat[pos + j] * flat[pos + j];
          grad[pos + j] += l2 * flat[pos + j];
        }
        pos += nw + static_cast<std::size_t>(widths_[l]);
      }
    }
    return loss;
  }

 private:
  void forward(std::span<const double> flat, std::span<const double> x) {
    if (static_cast<int>(x.size()) != widths_[0])
      throw std::invalid_argument("point dimension must equal input_dim");
    std::copy(x.begin(), x.end(), acts_[0].begin());
    const std::size_t last = widths_.size() - 1;
    std::size_t pos = 0;
    for (std::size_t l = 1; l < widths_.size(); ++l) {
      const int units = widths_[l];
      const int fan_in = widths_[l - 1];
      const double* w = flat.data() + pos;
      const double* b = flat.data() + pos + static_cast<std::size_t>(units) * fan_in;
      for (int u = 0; u < units; ++u) {
        double z = b[u];
        const double* wu = w + static_cast<std::size_t>(u) * fan_in;
        for (int j = 0; j < fan_in; ++j) z += wu[j] * acts_[l - 1][j];
        pre_[l][u] = z;
        acts_[l][u] = (l == last) ? z : activate(arch_.activation, z);
      }
      pos += static_cast<std::size_t>(units) * (fan_in + 1);
    }
  }

  // Accumulates one sample's gradient; expects delta_ at the output layer to
  // hold dLoss/dz_out and the forward buffers to match.
  void backward(std::span<const double> flat, std::span<double> grad) {
    const std::size_t last = widths_.size() - 1;
    std::size_t pos_end = flat.size();
    for (std::size_t l = last; l >= 1; --l) {
      const int units = widths_[l];
      const int fan_in = widths_[l - 1];
      const std::size_t pos = pos_end - static_cast<std::size_t>(units) * (fan_in + 1);
      const double* w = flat.data() + pos;
      double* gw = grad.data() + pos;
      double* gb = gw + static_cast<std::size_t>(units) * fan_in;
      if (l > 1) std::fill(delta_[l - 1].begin(), delta_[l - 1].end(), 0.0);
      for (int u = 0; u < units; ++u) {
        const double dz = delta_[l][u];
        const double* wu = w + static_cast<std::size_t>(u) * fan_in;
        double* gwu = gw + static_cast<std::size_t>(u) * fan_in;
        for (int j = 0; j < fan_in; ++j) {
          gwu[j] += dz * acts_[l - 1][j];
          if (l > 1) delta_[l - 1][j] += dz * wu[j];
        }
        gb[u] += dz;
      }
      if (l > 1)
        for (int j = 0; j < fan_in; ++j)
          delta_[l - 1][j] *= activate_deriv(arch_.activation, pre_[l - 1][j]);
      pos_end = pos;
    }
  }

  ArchitectureSpec arch_;
  std::vector<int> widths_;
  int dim_;
  std::vector<std::vector<double>> acts_, pre_, delta_;
};

/// One-shot functional forms of the engine operations.
inline std::pair<double, std::vector<double>> loss_and_grad(const ArchitectureSpec& arch,
                                                            const Params& params,
                                                            const LabeledSet& set, double l2) {
  MlpEval eval(arch);
  std::vector<double> flat = params.flatten();
  std::vector<double> grad(flat.size());
  const double loss = eval.loss_and_grad(flat, set, l2, grad);
  return {loss, std::move(grad)};
}

inline int predict(const ArchitectureSpec& arch, const Params& params,
                   std::span<const double> x) {
  MlpEval eval(arch);
  return eval.predict(params.flatten(), x);
}

}  // namespace capmeter
