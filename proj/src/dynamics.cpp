#include "spin1/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

namespace spin1 {

Propagator::Propagator(ChainConfig cfg, PropagatorOptions opts) : cfg_(std::move(cfg)), opts_(opts) {
  cfg_.validate();
  if (cfg_.sites > opts_.max_sites)
    throw std::invalid_argument("full-space propagation capped at N=" + std::to_string(opts_.max_sites));
}

Propagator::Block& Propagator::block(int magnetization, int momentum) {
  const auto key = std::make_pair(magnetization, momentum);
  if (auto it = blocks_.find(key); it != blocks_.end()) return it->second;
  Block b;
  b.sector = global_sector_cache().get(cfg_.sites, magnetization, momentum);
  const SectorMatrix h = build_hamiltonian(cfg_, b.sector);
  b.h = h.dense();
  b.hermitian = h.hermitian == HermitianFlag::hermitian;
  EigenSystem es = diagonalize(h);
  b.values = es.values;
  b.vectors = es.right;
  if (b.hermitian) {
    b.inverse = b.vectors.adjoint();
  } else {
    Eigen::FullPivLU<Mat> lu(b.vectors);
    if (lu.rcond() * opts_.condition_limit < 1.0) {
      b.dense_exponential = true;
      warnings_.push_back("sector (" + std::to_string(magnetization) + "," + std::to_string(momentum) +
                          "): eigenvector matrix ill-conditioned, using dense exponential");
    } else {
      b.inverse = lu.inverse();
      b.inverse_row_norms = b.inverse.rowwise().norm();
    }
  }
  return blocks_.emplace(key, std::move(b)).first->second;
}

std::vector<std::pair<Propagator::Block*, Vec>> Propagator::components(const Vec& psi0) {
  if (static_cast<Code>(psi0.size()) != pow3(cfg_.sites)) throw std::invalid_argument("evolve: wrong vector length");
  std::vector<std::pair<Block*, Vec>> out;
  for (const auto& [m, k] : all_sector_labels(cfg_.sites)) {
    auto sec = global_sector_cache().get(cfg_.sites, m, k);
    if (sec->dim() == 0) continue;
    Vec c = project_to_sector(*sec, psi0);
    if (c.norm() < 1e-14 * std::max(1.0, psi0.norm())) continue;
    out.emplace_back(&block(m, k), std::move(c));
  }
  return out;
}

Vec Propagator::spectral_weights(const Block& b, const Vec& c) const {
  Vec x = b.inverse * c;
  if (b.hermitian || opts_.roundoff_tol <= 0.0) return x;
  const double scale = opts_.roundoff_tol * c.norm();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) < scale * b.inverse_row_norms[i]) x[i] = 0.0;
  return x;
}

Vec Propagator::evolve(const Vec& psi0, double t) {
  Vec out = Vec::Zero(psi0.size());
  for (auto& [b, c] : components(psi0)) {
    Vec evolved;
    if (b->dense_exponential) {
      evolved = (Mat(cplx(0.0, -t) * b->h).exp()) * c;
    } else {
      Vec x = spectral_weights(*b, c);
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] *= std::exp(cplx(0.0, -t) * b->values[i]);
      evolved = b->vectors * x;
    }
    out += embed_sector_vector(*b->sector, evolved);
  }
  return out;
}

FidelitySeries Propagator::fidelity_series(const Vec& psi0, std::span<const double> times, FidelityMode mode) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("fidelity_series: initial state must be normalized");
  FidelitySeries fs;
  fs.mode = mode;
  fs.times.assign(times.begin(), times.end());
  auto parts = components(psi0);

  struct Prepared {
    Block* b;
    Vec c;
    Vec weights;  // V^{-1} c
    Vec overlap;  // V^H c
    Mat gram;     // V^H V (empty for Hermitian blocks)
  };
  std::vector<Prepared> prep;
  for (auto& [b, c] : parts) {
    Prepared p{b, c, {}, {}, {}};
    if (!b->dense_exponential) {
      p.weights = spectral_weights(*b, c);
      p.overlap = b->vectors.adjoint() * c;
      if (!b->hermitian) p.gram = b->vectors.adjoint() * b->vectors;
    }
    prep.push_back(std::move(p));
  }

  for (double t : times) {
    cplx amp = 0.0;
    double nrm = 0.0;
    for (const auto& p : prep) {
      if (p.b->dense_exponential) {
        const Vec e = (Mat(cplx(0.0, -t) * p.b->h).exp()) * p.c;
        amp += p.c.dot(e);
        nrm += e.squaredNorm();
        continue;
      }
      Vec x = p.weights;
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] *= std::exp(cplx(0.0, -t) * p.b->values[i]);
      amp += p.overlap.dot(x);
      nrm += p.b->hermitian ? x.squaredNorm() : x.dot(p.gram * x).real();
    }
    const double lit = std::norm(amp);
    fs.fidelity_literal.push_back(lit);
    fs.fidelity_normalized.push_back(lit / nrm);
    fs.norm.push_back(nrm);
  }
  fs.fidelity = mode == FidelityMode::literal ? fs.fidelity_literal : fs.fidelity_normalized;
  fs.warnings = warnings_;
  return fs;
}

Vec evolve(const ChainConfig& cfg, const Vec& psi0, double t) { return Propagator(cfg).evolve(psi0, t); }

FidelitySeries fidelity_series(const ChainConfig& cfg, const Vec& psi0, std::span<const double> times,
                               FidelityMode mode) {
  return Propagator(cfg).fidelity_series(psi0, times, mode);
}

std::vector<double> uniform_grid(double t_max, double step) {
  if (!(step > 0.0) || t_max < 0.0) throw std::invalid_argument("uniform_grid: need step > 0 and t_max >= 0");
  const auto n = static_cast<std::size_t>(std::floor(t_max / step + 1e-9));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = static_cast<double>(i) * step;
  return g;
}

}  // namespace spin1
