#pragma once

#include <functional>

#include "spin1/operators.hpp"

namespace spin1 {

// Normalized member of the ferromagnetic tower, (S^-)^p |all +1>, with
// magnetization M = N - p and zero momentum.
struct TowerState {
  int sites = 0;
  int lowerings = 0;
  double raw_norm = 0.0;  // ||(S^-)^p |all +1>|| before normalization
  Vec vector;             // full space, unit norm

  int magnetization() const { return sites - lowerings; }
};

struct CoherentState {
  cplx beta{};
  int sites = 0;
  Vec vector;  // full space, unit norm
};

// Total lowering operator S^- = sum_j S^-_j on a full-space vector.
Vec apply_total_lowering(const Vec& v, int sites);

// sqrt((2N)! p! / (2N-p)!)
double tower_norm(int sites, int lowerings);

TowerState tower_state(int sites, int lowerings);
cplx tower_energy(const ChainConfig& cfg, int lowerings);

struct TowerResidual {
  double residual = 0.0;      // ||H psi_p - E(p) psi_p||
  double hop_residual = 0.0;  // sum over hops of ||H_n psi_p||
};

// Residual evaluated with sector matrices in the (M = N - p, k = 0) block.
TowerResidual verify_tower(const ChainConfig& cfg, int lowerings);

// Same check with an arbitrary full-space operator action; used for
// negative controls with couplings that break translation symmetry.
double tower_residual_full(const std::function<Vec(const Vec&)>& hamiltonian, const TowerState& psi, cplx energy);

// exp(beta S^-)|all +1> summed term by term, then normalized.
CoherentState coherent_state(int sites, cplx beta);

// (+1, -1, +1, -1, ...) product state.
Vec neel_state(int sites);
ProductState neel_product_state(int sites);

}  // namespace spin1
