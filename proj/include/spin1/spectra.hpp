#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spin1/operators.hpp"

namespace spin1 {

struct DiagOptions {
  bool right_vectors = true;
  bool left_vectors = false;
};

// Eigen-decomposition of a sector block. Hermitian inputs come back sorted
// ascending with real values; general inputs are sorted by (re, im).
// Right vectors are columns of unit norm. Left vectors, when requested, are
// scaled so that L^H R = I on a simple spectrum.
struct EigenSystem {
  Vec values;
  Mat right;
  std::optional<Mat> left;
  bool hermitian_input = false;
  // Eigenvalue indices whose eigenvectors are (nearly) linearly dependent.
  std::vector<std::size_t> near_defective;
};

EigenSystem diagonalize(const SectorMatrix& a, DiagOptions opts = {});
EigenSystem diagonalize_dense(Mat a, bool hermitian, DiagOptions opts = {});

// max_i ||A r_i - lambda_i r_i|| / ||A||_F
double max_eigen_residual(const Mat& a, const EigenSystem& es);

// Lexicographic (re, im) ordering for deterministic output.
std::vector<std::size_t> lexicographic_order(const Vec& values);

// ---- level-spacing ratios -------------------------------------------------

struct Histogram {
  std::vector<double> edges;      // size bins+1
  std::vector<double> densities;  // size bins, integrates to 1 over in-range samples
  std::size_t out_of_range = 0;
};

Histogram make_histogram(std::span<const double> samples, double lo, double hi, int bins);

struct RStatistics {
  double mean_r = 0.0;
  std::vector<double> ratios;
  Histogram spacing_histogram;  // unfolded spacings; empty below 50 levels
  double central_fraction = 1.0;
  std::size_t levels_used = 0;
  std::size_t dropped_spacings = 0;
};

// r_i = min(s_{i-1}/s_i, s_i/s_{i-1}) over consecutive positive spacings of
// sorted levels. No truncation and no minimum size.
std::vector<double> spacing_ratios(std::span<const double> sorted_levels);

struct RStatOptions {
  double central_fraction = 0.8;
  double degeneracy_cutoff = 1e-12;  // relative to spectral width
  int unfold_degree = 10;
  int histogram_bins = 30;
  double histogram_max = 4.0;
};

// Needs at least 10 levels after truncation; spacings below the cutoff are
// removed (counted in dropped_spacings) before forming ratios.
RStatistics r_statistic(std::vector<double> levels, const RStatOptions& opts = {});

// Index range [lo, hi) of the central fraction of `count` sorted levels.
std::pair<std::size_t, std::size_t> central_window(std::size_t count, double central_fraction);

// Polynomial unfolding: fit the staircase N(E_i) = i with a Legendre series
// of the given degree over the whole sorted spectrum and return the
// unfolded spacings inside the central window.
std::vector<double> unfold(std::vector<double> levels, int degree, double central_fraction);

// ---- complex spacing ratios -----------------------------------------------

struct CsrStatistics {
  std::vector<cplx> eigenvalues;  // after collapsing repeats, (re, im) order
  std::vector<cplx> lambdas;      // aligned with eigenvalues
  double mean_cos_theta = 0.0;
  double mean_abs_lambda = 0.0;
  std::size_t collapsed = 0;
};

CsrStatistics csr(std::span<const cplx> values, double repeat_tol = 1e-13);

// ---- reference ensembles ---------------------------------------------------

namespace reference {

inline constexpr double kMeanRPoisson = 0.386;
inline constexpr double kMeanRGoe = 0.536;
inline constexpr double kMeanRGue = 0.603;
inline constexpr double kMeanCosUncorrelated = 0.0;
inline constexpr double kMeanCosGinibre = -0.24;

double poisson_spacing(double s);
double wigner_goe_spacing(double s);
// Densities of r in [0, 1].
double poisson_ratio(double r);
double goe_ratio(double r);

std::vector<double> poisson_levels(std::size_t count, std::mt19937_64& rng);
std::vector<double> goe_spectrum(std::size_t dim, std::mt19937_64& rng);
std::vector<cplx> ginibre_spectrum(std::size_t dim, std::mt19937_64& rng);
std::vector<cplx> uniform_disk_levels(std::size_t count, std::mt19937_64& rng);

}  // namespace reference

}  // namespace spin1
