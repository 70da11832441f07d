#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <algorithm>
#include <random>

#include "npiv/dataset.hpp"
#include "npiv/dgp.hpp"

namespace fixtures {

inline const npiv::Dgp& design() {
  static const npiv::Dgp dgp;
  return dgp;
}

inline npiv::Dataset design_sample(Eigen::Index n, std::uint64_t seed) {
  return design().sample(n, seed);
}

// Design sample with an independent uniform covariate Z appended.
inline npiv::Dataset design_sample_with_z(Eigen::Index n, std::uint64_t seed) {
  const npiv::Dataset base = design_sample(n, seed);
  std::mt19937_64 engine(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::MatrixXd z(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) z(i, 0) = uniform(engine);
  return npiv::Dataset(base.x(), base.w(), base.y(), z);
}

inline Eigen::VectorXi shuffled_order(Eigen::Index n, std::uint64_t seed) {
  Eigen::VectorXi order = Eigen::VectorXi::LinSpaced(n, 0, static_cast<int>(n - 1));
  std::mt19937_64 engine(seed);
  std::shuffle(order.data(), order.data() + n, engine);
  return order;
}

}  // namespace fixtures
