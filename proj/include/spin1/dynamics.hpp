#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "spin1/spectra.hpp"

namespace spin1 {

enum class FidelityMode { literal, normalized };

struct FidelitySeries {
  std::vector<double> times;
  std::vector<double> fidelity;  // selected by mode
  std::vector<double> fidelity_literal;
  std::vector<double> fidelity_normalized;
  std::vector<double> norm;  // <psi(t)|psi(t)>
  FidelityMode mode = FidelityMode::literal;
  std::vector<std::string> warnings;
};

struct PropagatorOptions {
  int max_sites = 10;
  double condition_limit = 1e10;
  // Non-Hermitian blocks: a spectral weight (V^{-1} c)_i smaller than
  // roundoff_tol * |row i of V^{-1}| * |c| is indistinguishable from rounding
  // error and is set to zero. Otherwise exp(Im(lambda) t) amplifies that noise
  // and a state inside the tower leaks out of it. 0 disables the filter.
  double roundoff_tol = 1e-11;
};

// exp(-iHt) on full-space vectors, assembled from per-sector spectral
// decompositions V exp(-i Lambda t) V^{-1}. Sectors are decomposed lazily,
// only where the evolved state has weight.
class Propagator {
 public:
  explicit Propagator(ChainConfig cfg, PropagatorOptions opts = {});

  Vec evolve(const Vec& psi0, double t);
  FidelitySeries fidelity_series(const Vec& psi0, std::span<const double> times, FidelityMode mode);

  const ChainConfig& config() const { return cfg_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  struct Block {
    SectorPtr sector;
    Mat h;  // dense sector Hamiltonian, kept for the fallback path
    Vec values;
    Mat vectors;
    Mat inverse;  // V^{-1}, or V^H for Hermitian blocks
    Eigen::VectorXd inverse_row_norms;
    bool hermitian = false;
    bool dense_exponential = false;
  };

  Block& block(int magnetization, int momentum);
  std::vector<std::pair<Block*, Vec>> components(const Vec& psi0);
  Vec spectral_weights(const Block& b, const Vec& c) const;

  ChainConfig cfg_;
  PropagatorOptions opts_;
  std::map<std::pair<int, int>, Block> blocks_;
  std::vector<std::string> warnings_;
};

Vec evolve(const ChainConfig& cfg, const Vec& psi0, double t);
FidelitySeries fidelity_series(const ChainConfig& cfg, const Vec& psi0, std::span<const double> times,
                               FidelityMode mode = FidelityMode::literal);

// 0, step, 2 step, ... up to and including t_max (within rounding).
std::vector<double> uniform_grid(double t_max, double step);

}  // namespace spin1
