#pragma once

// Enumeration of binary labelings with the first label fixed to 0.
// Complementing a labeling complements the classifier output, so fixing one
// position loses no generality and halves the search. While n-1 fits the
// exhaustive budget every labeling appears once, in ascending integer order
// (remaining bits big-endian); beyond it a fixed-size uniform sample is
// drawn, each labeling a pure function of (seed, index).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "capmeter/rng.hpp"

namespace capmeter {

class LabelingStream {
 public:
  /// n >= 1; exhaustive when n-1 <= max_exhaustive_bits, otherwise a sample
  /// of 2^max_exhaustive_bits labelings. seed only matters when sampling.
  LabelingStream(int n, int max_exhaustive_bits, std::uint64_t seed)
      : n_(n), seed_(seed) {
    if (n < 1) throw std::invalid_argument("LabelingStream: n must be >= 1");
    if (max_exhaustive_bits < 0 || max_exhaustive_bits > 62)
      throw std::invalid_argument("LabelingStream: max_exhaustive_bits out of range");
    exhaustive_ = (n - 1) <= max_exhaustive_bits;
    const int bits = exhaustive_ ? n - 1 : max_exhaustive_bits;
    count_ = std::uint64_t{1} << bits;
  }

  bool exhaustive() const noexcept { return exhaustive_; }
  std::uint64_t count() const noexcept { return count_; }
  int n() const noexcept { return n_; }

  /// Labeling by index; pure, safe from any thread.
  std::vector<std::uint8_t> labels(std::uint64_t index) const {
    if (index >= count_) throw std::out_of_range("LabelingStream: index out of range");
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n_), 0);
    if (exhaustive_) {
      for (int j = 1; j < n_; ++j)
        out[static_cast<std::size_t>(j)] = (index >> (n_ - 1 - j)) & 1;
    } else {
      const std::uint64_t key = rng::derive(seed_, rng::kTagLabeling, index);
      for (int j = 1; j < n_; ++j) {
        const int t = j - 1;
        out[static_cast<std::size_t>(j)] =
            (rng::word_at(key, static_cast<std::uint64_t>(t / 64)) >> (t % 64)) & 1;
      }
    }
    return out;
  }

 private:
  int n_;
  std::uint64_t seed_;
  bool exhaustive_ = true;
  std::uint64_t count_ = 1;
};

}  // namespace capmeter
