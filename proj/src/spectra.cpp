#include "spin1/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lapack.hpp"
#include "spin1/errors.hpp"

namespace spin1 {

namespace {

bool lex_less(const cplx& x, const cplx& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

void permute_columns(Mat& m, const std::vector<std::size_t>& order) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(order[i]));
  m.swap(out);
}

// Eigenvector pairs that share an eigenvalue and are nearly parallel.
std::vector<std::size_t> parallel_pairs(const Vec& values, const Mat& right) {
  std::vector<std::size_t> flagged;
  const Eigen::Index n = values.size();
  if (right.cols() != n || n == 0) return flagged;
  const double tol = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<bool> mark(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n && values[j].real() - values[i].real() <= tol; ++j) {
      if (std::abs(values[j] - values[i]) > tol) continue;
      if (std::abs(right.col(i).dot(right.col(j))) > 1.0 - 1e-6) mark[i] = mark[j] = true;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (mark[i]) flagged.push_back(static_cast<std::size_t>(i));
  return flagged;
}

// Legendre polynomials P_0..P_degree at x.
void legendre_row(double x, int degree, double* out) {
  out[0] = 1.0;
  if (degree >= 1) out[1] = x;
  for (int l = 2; l <= degree; ++l) out[l] = ((2.0 * l - 1.0) * x * out[l - 1] - (l - 1.0) * out[l - 2]) / l;
}

}  // namespace

std::vector<std::size_t> lexicographic_order(const Vec& values) {
  std::vector<std::size_t> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(values[static_cast<Eigen::Index>(a)], values[static_cast<Eigen::Index>(b)]);
  });
  return order;
}

EigenSystem diagonalize_dense(Mat a, bool hermitian, DiagOptions opts) {
  if (a.rows() != a.cols()) throw std::invalid_argument("diagonalize: matrix is not square");
  if (!a.allFinite()) throw std::invalid_argument("diagonalize: matrix has non-finite entries");
  EigenSystem es;
  es.hermitian_input = hermitian;
  if (hermitian) {
    const Eigen::VectorXd w = lapack::heev(a, opts.right_vectors);
    es.values = w.cast<cplx>();
    if (opts.right_vectors) {
      es.right = std::move(a);
      if (opts.left_vectors) es.left = es.right;
    }
    return es;
  }
  Mat vr, vl;
  es.values = lapack::geev(a, opts.right_vectors || opts.left_vectors ? &vr : nullptr, opts.left_vectors ? &vl : nullptr);
  const auto order = lexicographic_order(es.values);
  Vec sorted(es.values.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    sorted[static_cast<Eigen::Index>(i)] = es.values[static_cast<Eigen::Index>(order[i])];
  es.values = sorted;
  if (vr.size() > 0) {
    permute_columns(vr, order);
    vr.colwise().normalize();
  }
  if (opts.left_vectors) {
    permute_columns(vl, order);
    std::vector<bool> bad(static_cast<std::size_t>(vl.cols()), false);
    for (Eigen::Index i = 0; i < vl.cols(); ++i) {
      const cplx s = vl.col(i).normalized().dot(vr.col(i));  // l^H r
      if (std::abs(s) < 1e-8) bad[static_cast<std::size_t>(i)] = true;
      vl.col(i) = vl.col(i) / std::conj(vl.col(i).dot(vr.col(i)));
    }
    for (std::size_t i = 0; i < bad.size(); ++i)
      if (bad[i]) es.near_defective.push_back(i);
    es.left = std::move(vl);
  } else {
    es.near_defective = parallel_pairs(es.values, vr);
  }
  if (opts.right_vectors) es.right = std::move(vr);
  return es;
}

EigenSystem diagonalize(const SectorMatrix& a, DiagOptions opts) {
  return diagonalize_dense(a.dense(), a.hermitian == HermitianFlag::hermitian, opts);
}

double max_eigen_residual(const Mat& a, const EigenSystem& es) {
  if (es.right.cols() != es.values.size()) throw std::invalid_argument("max_eigen_residual: no right eigenvectors");
  const double scale = std::max(a.norm(), 1e-300);
  const Mat res = a * es.right - es.right * es.values.asDiagonal();
  return res.colwise().norm().maxCoeff() / scale;
}

Histogram make_histogram(std::span<const double> samples, double lo, double hi, int bins) {
  if (bins <= 0 || !(hi > lo)) throw std::invalid_argument("make_histogram: need bins > 0 and hi > lo");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
  std::vector<std::size_t> counts(bins, 0);
  std::size_t inside = 0;
  for (double s : samples) {
    if (s < lo || s >= hi) {
      ++h.out_of_range;
      continue;
    }
    auto b = static_cast<int>((s - lo) / width);
    counts[std::min(b, bins - 1)]++;
    ++inside;
  }
  h.densities.assign(bins, 0.0);
  if (inside > 0)
    for (int b = 0; b < bins; ++b) h.densities[b] = counts[b] / (static_cast<double>(inside) * width);
  return h;
}

std::vector<double> spacing_ratios(std::span<const double> sorted_levels) {
  std::vector<double> spacings;
  for (std::size_t i = 1; i < sorted_levels.size(); ++i) {
    const double s = sorted_levels[i] - sorted_levels[i - 1];
    if (s > 0.0) spacings.push_back(s);
  }
  std::vector<double> r;
  for (std::size_t i = 1; i < spacings.size(); ++i) {
    const double q = spacings[i] / spacings[i - 1];
    r.push_back(std::min(q, 1.0 / q));
  }
  return r;
}

std::pair<std::size_t, std::size_t> central_window(std::size_t count, double central_fraction) {
  if (!(central_fraction > 0.0 && central_fraction <= 1.0))
    throw std::invalid_argument("central fraction must lie in (0, 1]");
  const auto cut = static_cast<std::size_t>(std::floor(0.5 * (1.0 - central_fraction) * static_cast<double>(count) + 1e-9));
  return {cut, count - cut};
}

RStatistics r_statistic(std::vector<double> levels, const RStatOptions& opts) {
  std::sort(levels.begin(), levels.end());
  const auto [lo, hi] = central_window(levels.size(), opts.central_fraction);
  RStatistics out;
  out.central_fraction = opts.central_fraction;
  out.levels_used = hi - lo;
  if (out.levels_used < 10)
    throw std::invalid_argument("r_statistic: need at least 10 levels after truncation, have " +
                                std::to_string(out.levels_used));
  const double width = levels[hi - 1] - levels[lo];
  if (!(width > 0.0)) throw std::invalid_argument("r_statistic: spectrum is fully degenerate");
  const double cutoff = opts.degeneracy_cutoff * width;
  std::vector<double> spacings;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double s = levels[i] - levels[i - 1];
    if (s < cutoff)
      ++out.dropped_spacings;
    else
      spacings.push_back(s);
  }
  if (spacings.size() < 2) throw std::invalid_argument("r_statistic: fewer than two non-degenerate spacings");
  for (std::size_t i = 1; i < spacings.size(); ++i) {
    const double q = spacings[i] / spacings[i - 1];
    out.ratios.push_back(std::min(q, 1.0 / q));
  }
  out.mean_r = std::accumulate(out.ratios.begin(), out.ratios.end(), 0.0) / static_cast<double>(out.ratios.size());
  if (levels.size() >= 50) {
    const auto s = unfold(levels, opts.unfold_degree, opts.central_fraction);
    out.spacing_histogram = make_histogram(s, 0.0, opts.histogram_max, opts.histogram_bins);
  }
  return out;
}

std::vector<double> unfold(std::vector<double> levels, int degree, double central_fraction) {
  if (levels.size() < 50) throw std::invalid_argument("unfold: need at least 50 levels");
  if (degree < 1) throw std::invalid_argument("unfold: polynomial degree must be >= 1");
  std::sort(levels.begin(), levels.end());
  const double lo = levels.front();
  const double hi = levels.back();
  const double half = 0.5 * (hi - lo);
  if (!(half > 0.0)) throw std::invalid_argument("unfold: spectrum is fully degenerate");
  const double mid = 0.5 * (hi + lo);
  const auto n = static_cast<Eigen::Index>(levels.size());
  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd staircase(n);
  std::vector<double> row(degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    legendre_row((levels[i] - mid) / half, degree, row.data());
    for (int l = 0; l <= degree; ++l) design(i, l) = row[l];
    staircase[i] = static_cast<double>(i);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto rdiag = qr.matrixR().diagonal().cwiseAbs();
  if (qr.rank() < degree + 1 || rdiag.minCoeff() < 1e-10 * rdiag.maxCoeff())
    throw std::invalid_argument("unfold: staircase fit of degree " + std::to_string(degree) +
                                " is ill-conditioned; use a lower degree");
  const Eigen::VectorXd coeff = qr.solve(staircase);
  const Eigen::VectorXd smooth = design * coeff;
  const auto [wlo, whi] = central_window(levels.size(), central_fraction);
  std::vector<double> s;
  for (std::size_t i = wlo + 1; i < whi; ++i)
    s.push_back(smooth[static_cast<Eigen::Index>(i)] - smooth[static_cast<Eigen::Index>(i - 1)]);
  return s;
}

CsrStatistics csr(std::span<const cplx> values, double repeat_tol) {
  std::vector<cplx> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  CsrStatistics out;
  // Collapse repeats; a repeat lies within repeat_tol in real part of one
  // already kept, so only a short tail of kept values needs checking.
  for (const cplx& z : sorted) {
    bool repeat = false;
    for (auto it = out.eigenvalues.rbegin(); it != out.eigenvalues.rend() && z.real() - it->real() <= repeat_tol; ++it) {
      if (std::abs(z - *it) <= repeat_tol) {
        repeat = true;
        break;
      }
    }
    if (repeat)
      ++out.collapsed;
    else
      out.eigenvalues.push_back(z);
  }
  const std::size_t n = out.eigenvalues.size();
  if (n < 3) throw std::invalid_argument("csr: need at least 3 distinct eigenvalues");
  // Candidates compared by (distance, re, im); out.eigenvalues is already in
  // (re, im) order so a strict comparison on distance keeps the lexicographic
  // tie-break.
  out.lambdas.resize(n);
  double sum_cos = 0.0, sum_abs = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx e = out.eigenvalues[j];
    double d1 = INFINITY, d2 = INFINITY;
    std::size_t i1 = n, i2 = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = std::norm(out.eigenvalues[i] - e);
      if (d < d1) {
        d2 = d1;
        i2 = i1;
        d1 = d;
        i1 = i;
      } else if (d < d2) {
        d2 = d;
        i2 = i;
      }
    }
    const cplx lambda = (out.eigenvalues[i1] - e) / (out.eigenvalues[i2] - e);
    out.lambdas[j] = lambda;
    sum_abs += std::abs(lambda);
    sum_cos += std::cos(std::arg(lambda));
  }
  out.mean_cos_theta = sum_cos / static_cast<double>(n);
  out.mean_abs_lambda = sum_abs / static_cast<double>(n);
  return out;
}

namespace reference {

double poisson_spacing(double s) { return s < 0.0 ? 0.0 : std::exp(-s); }

double wigner_goe_spacing(double s) {
  using std::numbers::pi;
  return s < 0.0 ? 0.0 : 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}

double poisson_ratio(double r) { return (r < 0.0 || r > 1.0) ? 0.0 : 2.0 / ((1.0 + r) * (1.0 + r)); }

double goe_ratio(double r) {
  if (r < 0.0 || r > 1.0) return 0.0;
  // Wigner-like surmise for the ratio, folded onto [0, 1]
  return 2.0 * (27.0 / 8.0) * (r + r * r) / std::pow(1.0 + r + r * r, 2.5);
}

std::vector<double> poisson_levels(std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(count);
  for (auto& x : e) x = u(rng);
  std::sort(e.begin(), e.end());
  return e;
}

std::vector<double> goe_spectrum(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i) {
      const double x = i == j ? g(rng) * std::numbers::sqrt2 : g(rng);
      a(i, j) = x;
      a(j, i) = x;
    }
  const Eigen::VectorXd w = lapack::syev_values(a);
  return {w.data(), w.data() + w.size()};
}

std::vector<cplx> ginibre_spectrum(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 / static_cast<double>(dim)));
  const auto n = static_cast<Eigen::Index>(dim);
  Mat a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = cplx(g(rng), g(rng));
  const Vec w = lapack::geev(a, nullptr, nullptr);
  return {w.data(), w.data() + w.size()};
}

std::vector<cplx> uniform_disk_levels(std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> z;
  z.reserve(count);
  while (z.size() < count) {
    const cplx c(u(rng), u(rng));
    if (std::norm(c) <= 1.0) z.push_back(c);
  }
  return z;
}

}  // namespace reference

}  // namespace spin1
