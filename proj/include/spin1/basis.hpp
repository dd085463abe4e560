#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace spin1 {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Spin-1 product states are stored as base-3 integers. Site 1 (index 0) is
// the least significant digit and the digit map is +1 -> 0, 0 -> 1, -1 -> 2.
// This convention is part of every exported file format.
using Code = std::uint64_t;

inline constexpr int kMaxSites = 20;

struct ProductState {
  Code code = 0;
  int sites = 0;

  friend bool operator==(const ProductState&, const ProductState&) = default;
};

Code pow3(int k);

ProductState encode(std::span<const int> m);
std::vector<int> decode(const ProductState& s);
int magnetization(const ProductState& s);

// One-site translation: the value on site j moves to site j+1, site N wraps
// to site 1.  Momentum eigenstates satisfy T|k> = exp(i k)|k>.
ProductState translate(const ProductState& s);
Code translate_code(Code code, int sites);

struct Hop {
  int distance = 1;
  cplx coupling{0.0, 0.0};
};

// Periodic spin-1 chain with couplings J_h, J_c, J_z and any number of
// long-range hopping terms.
struct ChainConfig {
  int sites = 0;
  cplx jh{0.0, 0.0};
  cplx jc{0.0, 0.0};
  cplx jz{0.0, 0.0};
  std::vector<Hop> hops;

  // Throws std::invalid_argument on N < 3, N > kMaxSites or a hopping
  // distance outside 1..N/2-1 (even N) / 1..(N-1)/2 (odd N).
  void validate() const;
  bool all_real() const;
};

int max_hop_distance(int sites);

// Canonical orbit representative (minimal code under all translations) and
// the shift l with state = T^l(rep).
struct OrbitLocation {
  Code rep = 0;
  int shift = 0;
};
OrbitLocation locate_orbit(Code code, int sites);
int orbit_period(Code code, int sites);

// A (M, kappa) block. Momentum k = 2*pi*kappa/N. The Bloch state of a
// representative r with period R is
//   |r,k> = R^{-1/2} sum_{j<R} exp(-i k j) T^j |r>,
// admitted only when kappa*R = 0 (mod N).
struct SymmetrySector {
  int sites = 0;
  int magnetization = 0;
  int momentum = 0;
  std::vector<Code> reps;  // ascending
  std::vector<int> periods;
  std::vector<double> norms;  // sqrt(period)

  std::size_t dim() const { return reps.size(); }
  double k() const;
  std::optional<std::size_t> index_of(Code rep) const;
  // exp(i k shift)
  cplx phase(int shift) const;
};

using SectorPtr = std::shared_ptr<const SymmetrySector>;

SymmetrySector build_sector(int sites, int magnetization, int momentum);
inline SymmetrySector build_sector(const ChainConfig& cfg, int magnetization, int momentum) {
  return build_sector(cfg.sites, magnetization, momentum);
}

// Thread-safe memo of sectors keyed by (N, M, kappa).
class SectorCache {
 public:
  SectorPtr get(int sites, int magnetization, int momentum);

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, SectorPtr> sectors_;
};

SectorCache& global_sector_cache();

// Expand a sector vector into the 3^N product basis. Isometric.
Vec embed_sector_vector(const SymmetrySector& sec, const Vec& v);
// Adjoint of embed_sector_vector: Bloch-state components of a full vector.
Vec project_to_sector(const SymmetrySector& sec, const Vec& full);

// All (M, kappa) labels of an N-site chain, in ascending M then kappa.
std::vector<std::pair<int, int>> all_sector_labels(int sites);

}  // namespace spin1
