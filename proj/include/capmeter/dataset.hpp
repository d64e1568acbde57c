#pragma once

// Point sets in random position: i.i.d. standard-normal samples from the
// counter-based generator. Element (i, j) is normal_at(seed, i*k + j), so
// generate_dataset(n, k, seed) is always a row prefix of any longer draw
// with the same seed and dimension -- the "use the first n points" protocol
// comes for free and is bit-reproducible.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "capmeter/rng.hpp"

namespace capmeter {

struct Dataset {
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<double> points;  // row-major n*k

  double at(int i, int j) const { return points[static_cast<std::size_t>(i) * k + j]; }
  std::span<const double> row(int i) const {
    return {points.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
  }
};

inline Dataset generate_dataset(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw std::invalid_argument("generate_dataset: n and k must be >= 1");
  Dataset d{n, k, seed, {}};
  d.points.resize(static_cast<std::size_t>(n) * k);
  for (std::size_t t = 0; t < d.points.size(); ++t)
    d.points[t] = rng::normal_at(seed, t);
  return d;
}

}  // namespace capmeter
