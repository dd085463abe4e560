#include <doctest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "spin1/dynamics.hpp"
#include "spin1/exact_states.hpp"

using namespace spin1;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec random_state(int n, std::mt19937_64& rng) {
  return testing::random_vector(static_cast<Eigen::Index>(pow3(n)), rng).normalized();
}

}  // namespace

TEST_CASE("evolution at t = 0 is the identity") {
  std::mt19937_64 rng(1);
  const ChainConfig cfg{5, 1.0, cplx(0.0, 1.0), 0.5, {{2, cplx(0.0, 0.2)}}};
  const Vec v = random_state(5, rng);
  CHECK((evolve(cfg, v, 0.0) - v).norm() < 1e-12);
}

TEST_CASE("Zeeman-only evolution multiplies product states by a phase") {
  const ChainConfig cfg{5, 0.0, 0.0, 0.7, {}};
  Propagator prop(cfg);
  for (const std::vector<int>& m : {std::vector<int>{1, 0, -1, 1, 1}, std::vector<int>{-1, -1, 0, 0, -1}}) {
    Vec v = Vec::Zero(static_cast<Eigen::Index>(pow3(5)));
    const ProductState s = encode(m);
    v[static_cast<Eigen::Index>(s.code)] = 1.0;
    const double t = 3.3;
    const Vec e = prop.evolve(v, t);
    CHECK(std::abs(e[static_cast<Eigen::Index>(s.code)] - std::exp(cplx(0.0, -0.7 * magnetization(s) * t))) < 1e-12);
    CHECK(std::abs(e.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("agrees with a dense full-space exponential") {
  std::mt19937_64 rng(2);
  for (const ChainConfig& cfg : {ChainConfig{4, 1.0, 1.0, 0.5, {{1, 0.3}}},
                                 ChainConfig{4, 1.0, cplx(0.2, 0.9), 0.5, {{1, cplx(0.1, 0.3)}}}}) {
    const Mat h = Mat(build_full_space_hamiltonian(cfg));
    const Vec v = random_state(4, rng);
    for (double t : {0.4, 2.5}) {
      const Vec ref = Mat(cplx(0.0, -t) * h).exp() * v;
      CHECK((evolve(cfg, v, t) - ref).norm() < 1e-9 * std::max(1.0, ref.norm()));
    }
  }
}

TEST_CASE("Hermitian evolution conserves the norm") {
  std::mt19937_64 rng(3);
  const ChainConfig cfg{6, 1.0, 1.0, 0.5, {{2, 0.2}, {1, -0.4}}};
  const Vec v = random_state(6, rng);
  Propagator prop(cfg);
  const auto grid = uniform_grid(100.0, 5.0);
  const FidelitySeries fs = prop.fidelity_series(v, grid, FidelityMode::literal);
  for (double n : fs.norm) CHECK(std::abs(n - 1.0) < 1e-10);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(fs.fidelity_literal[i] == doctest::Approx(fs.fidelity_normalized[i]).epsilon(1e-9));
  CHECK(std::abs(prop.evolve(v, 100.0).norm() - 1.0) < 1e-10);
}

TEST_CASE("evolution composes") {
  std::mt19937_64 rng(4);
  for (const ChainConfig& cfg : {ChainConfig{5, 1.0, 1.0, 0.5, {{2, 0.2}}},
                                 ChainConfig{5, 1.0, cplx(0.0, 1.0), 0.5, {{2, cplx(0.0, 0.2)}}}}) {
    Propagator prop(cfg);
    const Vec v = random_state(5, rng);
    const Vec once = prop.evolve(v, 1.7);
    const Vec twice = prop.evolve(prop.evolve(v, 0.6), 1.1);
    CHECK((once - twice).norm() < 1e-9 * std::max(1.0, once.norm()));
  }
}

TEST_CASE("fidelity series matches explicit overlaps") {
  std::mt19937_64 rng(5);
  const ChainConfig cfg{5, 1.0, cplx(0.0, 1.0), 0.5, {{2, cplx(0.0, 0.2)}}};
  Propagator prop(cfg);
  const Vec v = random_state(5, rng);
  const std::vector<double> times = {0.0, 0.5, 2.0};
  const FidelitySeries fs = prop.fidelity_series(v, times, FidelityMode::normalized);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Vec e = prop.evolve(v, times[i]);
    const double lit = std::norm(v.dot(e));
    CHECK(fs.fidelity_literal[i] == doctest::Approx(lit).epsilon(1e-9));
    CHECK(fs.norm[i] == doctest::Approx(e.squaredNorm()).epsilon(1e-9));
    CHECK(fs.fidelity[i] == doctest::Approx(lit / e.squaredNorm()).epsilon(1e-9));
  }
  CHECK_THROWS_AS(prop.fidelity_series(2.0 * v, times, FidelityMode::literal), std::invalid_argument);
}

TEST_CASE("coherent states revive at 2 pi / J_z") {
  const double period = kTwoPi / 0.5;
  const std::vector<std::pair<cplx, cplx>> points = {
      {1.0, 0.0}, {1.0, 0.2}, {1.0, cplx(0.0, 0.2)}, {cplx(0.0, 1.0), cplx(0.0, 0.2)}};
  for (auto [jc, jn] : points) {
    const ChainConfig cfg{8, 1.0, jc, 0.5, {{3, jn}}};
    Propagator prop(cfg);
    const Vec psi = coherent_state(8, 1.0).vector;
    const std::vector<double> times = {period, 2.0 * period, 0.5 * period};
    const FidelitySeries fs = prop.fidelity_series(psi, times, FidelityMode::literal);
    CAPTURE(jc);
    CAPTURE(jn);
    CHECK(fs.fidelity[0] >= 1.0 - 1e-8);
    CHECK(fs.fidelity[1] >= 1.0 - 1e-8);
    CHECK(fs.fidelity[2] < 0.5);
    // the tower has real energies, so the state never leaves the unit sphere
    for (double n : fs.norm) CHECK(std::abs(n - 1.0) < 1e-8);
  }
}

TEST_CASE("the autocorrelation peaks at the tower period") {
  const ChainConfig cfg{8, 1.0, 1.0, 0.5, {{3, 0.2}}};
  Propagator prop(cfg);
  const auto grid = uniform_grid(20.0, 0.01);
  const FidelitySeries fs = prop.fidelity_series(coherent_state(8, 1.0).vector, grid, FidelityMode::literal);
  std::size_t best = 0;
  for (std::size_t i = 100; i < grid.size(); ++i)
    if (fs.fidelity[i] > fs.fidelity[best] || best == 0) best = i;
  CHECK(std::abs(grid[best] - kTwoPi / 0.5) < 0.02);
}

TEST_CASE("a Neel state relaxes to its diagonal-ensemble value") {
  const int n = 8;
  const ChainConfig cfg{n, 1.0, 1.0, 0.5, {{3, 0.2}}};
  // Long-time average of F is sum |<E|Neel>|^4 on a nondegenerate spectrum.
  double ipr = 0.0;
  for (auto [m, k] : all_sector_labels(n)) {
    if (m != 0) continue;
    auto sec = global_sector_cache().get(n, m, k);
    const Vec c = project_to_sector(*sec, neel_state(n));
    if (c.norm() < 1e-12) continue;
    const EigenSystem es = diagonalize(build_hamiltonian(cfg, sec));
    const Vec w = es.right.adjoint() * c;
    for (auto z : w) ipr += std::norm(z) * std::norm(z);
  }
  Propagator prop(cfg);
  const auto grid = uniform_grid(4000.0, 0.37);
  const FidelitySeries fs = prop.fidelity_series(neel_state(n), grid, FidelityMode::literal);
  double mean = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= 5.0) mean += fs.fidelity[i];
  mean /= static_cast<double>(std::count_if(grid.begin(), grid.end(), [](double t) { return t >= 5.0; }));
  CHECK(mean == doctest::Approx(ipr).epsilon(0.15));
  CHECK(ipr < 0.1);
  CHECK(fs.fidelity[static_cast<std::size_t>(2.0 / 0.37)] < 0.1);
}

TEST_CASE("tower superpositions stay normalized for complex couplings") {
  std::mt19937_64 rng(6);
  const int n = 6;
  for (auto [jc, jn] : std::vector<std::pair<cplx, cplx>>{{1.0, cplx(0.0, 0.3)}, {cplx(0.0, 1.0), cplx(0.0, 0.2)},
                                                          {cplx(0.4, 0.8), cplx(0.3, -0.5)}}) {
    Vec psi = Vec::Zero(static_cast<Eigen::Index>(pow3(n)));
    for (int p = 0; p <= 2 * n; ++p) psi += testing::random_coupling(rng, 1.0) * tower_state(n, p).vector;
    psi.normalize();
    Propagator prop(ChainConfig{n, 1.0, jc, 0.5, {{2, jn}}});
    const auto grid = uniform_grid(50.0, 0.5);
    const FidelitySeries fs = prop.fidelity_series(psi, grid, FidelityMode::normalized);
    CAPTURE(jc);
    for (double x : fs.norm) CHECK(std::abs(x - 1.0) < 1e-9);
    for (double f : fs.fidelity) CHECK(f <= 1.0 + 1e-9);
    CHECK(std::abs(fs.fidelity[0] - 1.0) < 1e-12);
  }
}

TEST_CASE("normalized fidelity stays in [0, 1] for amplifying dynamics") {
  std::mt19937_64 rng(7);
  Propagator prop(ChainConfig{6, 1.0, cplx(0.0, 1.0), 0.5, {{2, cplx(0.0, 0.2)}}});
  const auto grid = uniform_grid(20.0, 0.5);
  const FidelitySeries fs = prop.fidelity_series(random_state(6, rng), grid, FidelityMode::normalized);
  for (double f : fs.fidelity) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-9);
  }
  CHECK(fs.norm.back() > 1e3);  // the literal norm does grow
}

TEST_CASE("grid and size limits") {
  const auto g = uniform_grid(1.0, 0.1);
  CHECK(g.size() == 11);
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniform_grid(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Propagator(ChainConfig{11, 1.0, 1.0, 0.5, {}}), std::invalid_argument);
}
