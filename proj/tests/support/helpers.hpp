#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treeseq/autodiff/param_set.hpp"
#include "treeseq/autodiff/tensor.hpp"
#include "treeseq/random.hpp"

namespace treeseq::testing {

inline ad::Tensor random_vector(std::size_t n, Rng& rng, double range = 1.0) {
  ad::Tensor t = ad::Tensor::vector(n);
  for (double& x : t.data()) x = rng.uniform(-range, range);
  return t;
}

inline ad::Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng, double range = 1.0) {
  ad::Tensor t = ad::Tensor::matrix(r, c);
  for (double& x : t.data()) x = rng.uniform(-range, range);
  return t;
}

/// Scalar objective helper: Σ_i w_i · x_i with fixed random weights, so every
/// coordinate of x influences the loss differently.
inline std::vector<double> probe_weights(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n);
  for (double& x : w) x = rng.uniform(-1.0, 1.0);
  return w;
}

}  // namespace treeseq::testing
