#include "spin1/exact_states.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spin1 {

namespace {

constexpr double kLadder = 1.4142135623730951;

void check_sites(int sites) {
  if (sites < 1 || sites > 14) throw std::invalid_argument("full-space states need 1 <= N <= 14");
}

void check_lowerings(int sites, int p) {
  if (p < 0 || p > 2 * sites)
    throw std::invalid_argument("lowering count " + std::to_string(p) + " outside 0.." + std::to_string(2 * sites));
}

Vec all_up(int sites) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(pow3(sites)));
  v[0] = 1.0;
  return v;
}

}  // namespace

Vec apply_total_lowering(const Vec& v, int sites) {
  Vec out = Vec::Zero(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    if (v[c] == cplx(0.0, 0.0)) continue;
    Code rest = static_cast<Code>(c);
    Code place = 1;
    for (int j = 0; j < sites; ++j) {
      if (rest % 3 != 2) out[c + static_cast<Eigen::Index>(place)] += kLadder * v[c];
      rest /= 3;
      place *= 3;
    }
  }
  return out;
}

double tower_norm(int sites, int lowerings) {
  check_lowerings(sites, lowerings);
  // (2N)! p! / (2N-p)! = p! * prod_{i=0}^{p-1} (2N - i), accumulated in logs
  double log_sq = std::lgamma(lowerings + 1.0);
  for (int i = 0; i < lowerings; ++i) log_sq += std::log(2.0 * sites - i);
  return std::exp(0.5 * log_sq);
}

TowerState tower_state(int sites, int lowerings) {
  check_sites(sites);
  check_lowerings(sites, lowerings);
  Vec v = all_up(sites);
  for (int i = 0; i < lowerings; ++i) v = apply_total_lowering(v, sites);
  TowerState t;
  t.sites = sites;
  t.lowerings = lowerings;
  t.raw_norm = v.norm();
  t.vector = v / t.raw_norm;
  return t;
}

cplx tower_energy(const ChainConfig& cfg, int lowerings) {
  check_lowerings(cfg.sites, lowerings);
  return cfg.jh * static_cast<double>(cfg.sites) + cfg.jz * static_cast<double>(cfg.sites - lowerings);
}

TowerResidual verify_tower(const ChainConfig& cfg, int lowerings) {
  cfg.validate();
  const TowerState psi = tower_state(cfg.sites, lowerings);
  auto sec = global_sector_cache().get(cfg.sites, psi.magnetization(), 0);
  const Vec v = project_to_sector(*sec, psi.vector);
  const TermBlocks blocks = build_term_blocks(cfg, sec);
  const SectorMatrix h = combine_terms(blocks, cfg);
  TowerResidual r;
  r.residual = (h.storage * v - tower_energy(cfg, lowerings) * v).norm();
  for (const auto& [distance, block] : blocks.hops) r.hop_residual += (block * v).norm();
  return r;
}

double tower_residual_full(const std::function<Vec(const Vec&)>& hamiltonian, const TowerState& psi, cplx energy) {
  return (hamiltonian(psi.vector) - energy * psi.vector).norm();
}

CoherentState coherent_state(int sites, cplx beta) {
  check_sites(sites);
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
    throw std::invalid_argument("coherent_state: beta must be finite");
  Vec power = all_up(sites);
  Vec sum = power;
  cplx coeff = 1.0;
  for (int p = 1; p <= 2 * sites; ++p) {
    power = apply_total_lowering(power, sites);
    coeff *= beta / static_cast<double>(p);
    sum += coeff * power;
  }
  CoherentState out;
  out.beta = beta;
  out.sites = sites;
  out.vector = sum / sum.norm();
  return out;
}

ProductState neel_product_state(int sites) {
  if (sites <= 0 || sites % 2 != 0) throw std::invalid_argument("neel_state: N must be even and positive");
  std::vector<int> m(sites);
  for (int j = 0; j < sites; ++j) m[j] = j % 2 == 0 ? 1 : -1;
  return encode(m);
}

Vec neel_state(int sites) {
  const ProductState s = neel_product_state(sites);
  check_sites(sites);
  Vec v = Vec::Zero(static_cast<Eigen::Index>(pow3(sites)));
  v[static_cast<Eigen::Index>(s.code)] = 1.0;
  return v;
}

}  // namespace spin1
