#include "spin1/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spin1 {

namespace {

constexpr int digit_of(int m) { return 1 - m; }
constexpr int value_of(int digit) { return 1 - digit; }

}  // namespace

Code pow3(int k) {
  Code p = 1;
  for (int i = 0; i < k; ++i) p *= 3;
  return p;
}

ProductState encode(std::span<const int> m) {
  if (m.empty() || m.size() > static_cast<std::size_t>(kMaxSites))
    throw std::invalid_argument("encode: site count must be in 1.." + std::to_string(kMaxSites));
  Code code = 0;
  Code place = 1;
  for (int v : m) {
    if (v < -1 || v > 1) throw std::invalid_argument("encode: site value " + std::to_string(v) + " not in {+1,0,-1}");
    code += static_cast<Code>(digit_of(v)) * place;
    place *= 3;
  }
  return {code, static_cast<int>(m.size())};
}

std::vector<int> decode(const ProductState& s) {
  std::vector<int> m(s.sites);
  Code c = s.code;
  for (int j = 0; j < s.sites; ++j) {
    m[j] = value_of(static_cast<int>(c % 3));
    c /= 3;
  }
  return m;
}

int magnetization(const ProductState& s) {
  int total = 0;
  Code c = s.code;
  for (int j = 0; j < s.sites; ++j) {
    total += value_of(static_cast<int>(c % 3));
    c /= 3;
  }
  return total;
}

Code translate_code(Code code, int sites) {
  const Code top = pow3(sites - 1);
  return (code % top) * 3 + code / top;
}

ProductState translate(const ProductState& s) { return {translate_code(s.code, s.sites), s.sites}; }

int max_hop_distance(int sites) { return sites % 2 == 0 ? sites / 2 - 1 : (sites - 1) / 2; }

void ChainConfig::validate() const {
  if (sites < 3 || sites > kMaxSites)
    throw std::invalid_argument("chain needs 3.." + std::to_string(kMaxSites) + " sites, got " + std::to_string(sites));
  const int nmax = max_hop_distance(sites);
  for (const auto& h : hops) {
    if (h.distance < 1 || h.distance > nmax)
      throw std::invalid_argument("hopping distance " + std::to_string(h.distance) + " outside 1.." +
                                  std::to_string(nmax) + " for N=" + std::to_string(sites));
  }
}

bool ChainConfig::all_real() const {
  if (jh.imag() != 0.0 || jc.imag() != 0.0 || jz.imag() != 0.0) return false;
  return std::all_of(hops.begin(), hops.end(), [](const Hop& h) { return h.coupling.imag() == 0.0; });
}

OrbitLocation locate_orbit(Code code, int sites) {
  const Code top = pow3(sites - 1);
  Code best = code;
  int best_j = 0;
  Code t = code;
  for (int j = 1; j < sites; ++j) {
    t = (t % top) * 3 + t / top;
    if (t < best) {
      best = t;
      best_j = j;
    }
  }
  // T^{best_j} code = rep  =>  code = T^{N - best_j} rep
  return {best, (sites - best_j) % sites};
}

int orbit_period(Code code, int sites) {
  const Code top = pow3(sites - 1);
  Code t = code;
  for (int r = 1; r <= sites; ++r) {
    t = (t % top) * 3 + t / top;
    if (t == code) return r;
  }
  return sites;
}

double SymmetrySector::k() const { return 2.0 * std::numbers::pi * momentum / sites; }

std::optional<std::size_t> SymmetrySector::index_of(Code rep) const {
  auto it = std::lower_bound(reps.begin(), reps.end(), rep);
  if (it == reps.end() || *it != rep) return std::nullopt;
  return static_cast<std::size_t>(it - reps.begin());
}

cplx SymmetrySector::phase(int shift) const {
  // kappa*shift taken mod N keeps the argument small and exact at shift 0.
  const int q = static_cast<int>((static_cast<long long>(momentum) * shift) % sites);
  if (q == 0) return {1.0, 0.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * q / sites);
}

SymmetrySector build_sector(int sites, int magnetization_value, int momentum) {
  if (sites < 1 || sites > kMaxSites) throw std::invalid_argument("build_sector: bad site count");
  if (momentum < 0 || momentum >= sites) throw std::invalid_argument("build_sector: momentum index out of range");
  SymmetrySector sec;
  sec.sites = sites;
  sec.magnetization = magnetization_value;
  sec.momentum = momentum;
  if (std::abs(magnetization_value) > sites) return sec;

  const Code total = pow3(sites);
  const Code top = pow3(sites - 1);
  // Digit sum d = N - M for every state in the sector.
  const int digit_sum = sites - magnetization_value;
  std::vector<int> digits(sites, 0);
  int sum = 0;
  for (Code code = 0; code < total; ++code) {
    if (code > 0) {
      // increment the base-3 counter
      int j = 0;
      while (digits[j] == 2) {
        digits[j] = 0;
        sum -= 2;
        ++j;
      }
      ++digits[j];
      ++sum;
    }
    if (sum != digit_sum) continue;
    Code t = code;
    bool canonical = true;
    int period = sites;
    for (int r = 1; r < sites; ++r) {
      t = (t % top) * 3 + t / top;
      if (t < code) {
        canonical = false;
        break;
      }
      if (t == code) {
        period = r;
        break;
      }
    }
    if (!canonical) continue;
    if ((static_cast<long long>(momentum) * period) % sites != 0) continue;
    sec.reps.push_back(code);
    sec.periods.push_back(period);
    sec.norms.push_back(std::sqrt(static_cast<double>(period)));
  }
  return sec;
}

SectorPtr SectorCache::get(int sites, int magnetization_value, int momentum) {
  const auto key = std::make_tuple(sites, magnetization_value, momentum);
  {
    std::lock_guard lock(mu_);
    if (auto it = sectors_.find(key); it != sectors_.end()) return it->second;
  }
  auto built = std::make_shared<const SymmetrySector>(build_sector(sites, magnetization_value, momentum));
  std::lock_guard lock(mu_);
  return sectors_.try_emplace(key, std::move(built)).first->second;
}

SectorCache& global_sector_cache() {
  static SectorCache cache;
  return cache;
}

Vec embed_sector_vector(const SymmetrySector& sec, const Vec& v) {
  if (static_cast<std::size_t>(v.size()) != sec.dim())
    throw std::invalid_argument("embed_sector_vector: vector length " + std::to_string(v.size()) +
                                " != sector dim " + std::to_string(sec.dim()));
  Vec full = Vec::Zero(static_cast<Eigen::Index>(pow3(sec.sites)));
  for (std::size_t i = 0; i < sec.dim(); ++i) {
    Code t = sec.reps[i];
    const cplx amp = v[i] / sec.norms[i];
    for (int j = 0; j < sec.periods[i]; ++j) {
      full[static_cast<Eigen::Index>(t)] += amp * std::conj(sec.phase(j));
      t = translate_code(t, sec.sites);
    }
  }
  return full;
}

Vec project_to_sector(const SymmetrySector& sec, const Vec& full) {
  if (static_cast<Code>(full.size()) != pow3(sec.sites))
    throw std::invalid_argument("project_to_sector: full-space vector has wrong length");
  Vec v(static_cast<Eigen::Index>(sec.dim()));
  for (std::size_t i = 0; i < sec.dim(); ++i) {
    Code t = sec.reps[i];
    cplx acc = 0.0;
    for (int j = 0; j < sec.periods[i]; ++j) {
      acc += sec.phase(j) * full[static_cast<Eigen::Index>(t)];
      t = translate_code(t, sec.sites);
    }
    v[static_cast<Eigen::Index>(i)] = acc / sec.norms[i];
  }
  return v;
}

std::vector<std::pair<int, int>> all_sector_labels(int sites) {
  std::vector<std::pair<int, int>> labels;
  for (int m = -sites; m <= sites; ++m)
    for (int k = 0; k < sites; ++k) labels.emplace_back(m, k);
  return labels;
}

}  // namespace spin1
