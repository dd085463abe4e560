#pragma once

#include <optional>
#include <vector>

#include "spin1/spectra.hpp"

namespace spin1 {

// Subsystem A is sites 1..cut (the least significant base-3 digits), so a
// full-space vector reshapes column-major into a 3^cut x 3^(N-cut) matrix.
Mat reduced_density_matrix(const Vec& v, int sites, int cut, bool normalize = false);

// -sum lambda ln lambda over eigenvalues above 1e-14, in nats.
double von_neumann_entropy(const Mat& rho);

// A and B digit strings grouped by magnetization. For a
// state of definite total M the reduced density matrix is block diagonal in
// the subsystem magnetization, which makes the entropy cheap.
class Bipartition {
 public:
  Bipartition(int sites, int cut);

  int sites() const { return sites_; }
  int cut() const { return cut_; }
  // Entropy of a unit vector with every amplitude in total magnetization M.
  double entropy(const Vec& full, int magnetization) const;

 private:
  int sites_;
  int cut_;
  Code a_dim_;
  std::vector<std::vector<Code>> a_by_m_;  // index m + cut
  std::vector<std::vector<Code>> b_by_m_;  // index m + (sites - cut)
};

// Any unit vector; uses the block path when the support has one
// magnetization and the dense reduced density matrix otherwise.
double entanglement_entropy(const Vec& v, int sites, int cut);

struct EntropyScan {
  std::vector<std::size_t> eigen_index;
  std::vector<double> entropies;
  std::vector<double> eigenvalue_re;
  std::vector<double> eigenvalue_im;
  std::vector<std::size_t> scar_candidates;
  double threshold = 0.0;
  double median = 0.0;
  double mad = 0.0;
  int cut = 0;
};

double median_of(std::vector<double> x);
// Unscaled median absolute deviation.
double mad_of(const std::vector<double>& x);

// Right eigenvectors are normalized to unit norm before the partial trace.
// Default threshold: median - 3 MAD of the scan.
EntropyScan entropy_scan(const EigenSystem& es, const SymmetrySector& sec, std::optional<int> cut = std::nullopt,
                         std::optional<double> scar_threshold = std::nullopt);

// |<target|r_i>| / (|target| |r_i|) for every right eigenvector.
std::vector<double> eigenvector_overlaps(const EigenSystem& es, const Vec& target);

}  // namespace spin1
