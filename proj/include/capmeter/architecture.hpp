#pragma once

// Dense feed-forward architectures and their capacity bounds. Every unit
// carries a bias that counts as a weight, so a network's parameter count is
// the sum of (fan-in + 1) over its units. The lossless-memory dimension of
// such a network equals that parameter count and the MacKay dimension is
// twice it; both are upper bounds on what any trainer can reach.

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace capmeter {

enum class Activation { relu, tanh, logistic, identity };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::logistic: return "logistic";
    case Activation::identity: return "identity";
  }
  return "?";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "logistic") return Activation::logistic;
  if (s == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation: " + s);
}

/// Shape of a dense feed-forward binary classifier: k inputs, optional hidden
/// layers, one logistic output unit with bias. No skip connections, no
/// convolutions.
struct ArchitectureSpec {
  int input_dim = 1;
  std::vector<int> hidden;  // widths, first hidden layer first; may be empty
  Activation activation = Activation::relu;

  static constexpr int kMaxHiddenDepth = 4;

  void validate() const {
    if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
    if (static_cast<int>(hidden.size()) > kMaxHiddenDepth)
      throw std::invalid_argument("at most " + std::to_string(kMaxHiddenDepth) +
                                  " hidden layers supported");
    for (int h : hidden)
      if (h < 1) throw std::invalid_argument("hidden widths must be >= 1");
  }

  /// Widths including input and the single output unit: {k, h1, ..., 1}.
  std::vector<int> layer_widths() const {
    std::vector<int> w;
    w.reserve(hidden.size() + 2);
    w.push_back(input_dim);
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(1);
    return w;
  }
};

/// Total number of real parameters |NN|: sum of (fan-in + 1) over all units.
inline int param_count(const ArchitectureSpec& arch) {
  arch.validate();
  const std::vector<int> w = arch.layer_widths();
  int total = 0;
  for (std::size_t l = 1; l < w.size(); ++l) total += w[l] * (w[l - 1] + 1);
  return total;
}

struct CapacityBounds {
  long long param_count = 0;
  long long lm = 0;                 // lossless-memory dimension, = |NN|
  long long mk = 0;                 // MacKay dimension, = 2 |NN|
  std::vector<int> per_unit;        // fan-in + 1 for each unit, summing to |NN|
};

inline CapacityBounds capacity_bounds(const ArchitectureSpec& arch) {
  arch.validate();
  CapacityBounds b;
  const std::vector<int> w = arch.layer_widths();
  for (std::size_t l = 1; l < w.size(); ++l)
    for (int u = 0; u < w[l]; ++u) b.per_unit.push_back(w[l - 1] + 1);
  b.param_count = std::accumulate(b.per_unit.begin(), b.per_unit.end(), 0LL);
  b.lm = b.param_count;
  b.mk = 2 * b.param_count;
  return b;
}

/// Sample count below which the MacKay search assumes fits succeed and skips
/// testing: 2h(k-1) + k + 1. Defined for exactly one hidden layer.
inline int mk_skip_threshold(const ArchitectureSpec& arch) {
  arch.validate();
  if (arch.hidden.size() != 1)
    throw std::invalid_argument("mk_skip_threshold requires exactly one hidden layer");
  const int k = arch.input_dim;
  const int h = arch.hidden[0];
  return 2 * h * (k - 1) + k + 1;
}

}  // namespace capmeter
