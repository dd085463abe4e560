#pragma once

#include <random>

#include "spin1/basis.hpp"

namespace spin1::testing {

inline Vec random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

inline Mat random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

inline cplx random_coupling(std::mt19937_64& rng, double radius = 2.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const cplx z(u(rng), u(rng));
    if (std::abs(z) <= 1.0) return radius * z;
  }
}

}  // namespace spin1::testing
