#include "spin1/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace spin1 {

namespace {

double entropy_of_eigenvalues(const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] > 1e-14) s -= w[i] * std::log(w[i]);
  return s;
}

int digit_magnetization(Code code, int digits) {
  int m = 0;
  for (int j = 0; j < digits; ++j) {
    m += 1 - static_cast<int>(code % 3);
    code /= 3;
  }
  return m;
}

void check_cut(int sites, int cut) {
  if (cut < 1 || cut >= sites)
    throw std::invalid_argument("cut " + std::to_string(cut) + " must lie in 1.." + std::to_string(sites - 1));
}

}  // namespace

Mat reduced_density_matrix(const Vec& v, int sites, int cut, bool normalize) {
  check_cut(sites, cut);
  if (static_cast<Code>(v.size()) != pow3(sites)) throw std::invalid_argument("reduced_density_matrix: wrong length");
  const double nrm = v.norm();
  Vec u = v;
  if (std::abs(nrm - 1.0) > 1e-10) {
    if (!normalize) throw std::invalid_argument("reduced_density_matrix: state norm " + std::to_string(nrm) + " != 1");
    u /= nrm;
  }
  const auto da = static_cast<Eigen::Index>(pow3(cut));
  const Eigen::Map<const Mat> psi(u.data(), da, u.size() / da);
  return psi * psi.adjoint();
}

double von_neumann_entropy(const Mat& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("von_neumann_entropy: matrix not square");
  const cplx tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-8)
    throw std::invalid_argument("von_neumann_entropy: trace " + std::to_string(tr.real()) + " deviates from 1");
  Eigen::SelfAdjointEigenSolver<Mat> eig(rho, Eigen::EigenvaluesOnly);
  return entropy_of_eigenvalues(eig.eigenvalues());
}

Bipartition::Bipartition(int sites, int cut) : sites_(sites), cut_(cut), a_dim_(pow3(cut)) {
  check_cut(sites, cut);
  const int nb = sites - cut;
  a_by_m_.resize(2 * cut + 1);
  b_by_m_.resize(2 * nb + 1);
  for (Code a = 0; a < a_dim_; ++a) a_by_m_[digit_magnetization(a, cut) + cut].push_back(a);
  for (Code b = 0; b < pow3(nb); ++b) b_by_m_[digit_magnetization(b, nb) + nb].push_back(b);
}

double Bipartition::entropy(const Vec& full, int magnetization_value) const {
  const int nb = sites_ - cut_;
  double s = 0.0;
  for (int ma = -cut_; ma <= cut_; ++ma) {
    const int mb = magnetization_value - ma;
    if (mb < -nb || mb > nb) continue;
    const auto& as = a_by_m_[ma + cut_];
    const auto& bs = b_by_m_[mb + nb];
    Mat psi(static_cast<Eigen::Index>(as.size()), static_cast<Eigen::Index>(bs.size()));
    for (std::size_t j = 0; j < bs.size(); ++j)
      for (std::size_t i = 0; i < as.size(); ++i)
        psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            full[static_cast<Eigen::Index>(as[i] + a_dim_ * bs[j])];
    const Mat rho = psi.rows() <= psi.cols() ? Mat(psi * psi.adjoint()) : Mat(psi.adjoint() * psi);
    Eigen::SelfAdjointEigenSolver<Mat> eig(rho, Eigen::EigenvaluesOnly);
    s += entropy_of_eigenvalues(eig.eigenvalues());
  }
  return s;
}

double entanglement_entropy(const Vec& v, int sites, int cut) {
  check_cut(sites, cut);
  if (static_cast<Code>(v.size()) != pow3(sites)) throw std::invalid_argument("entanglement_entropy: wrong length");
  std::optional<int> m;
  bool definite = true;
  for (Eigen::Index c = 0; c < v.size() && definite; ++c) {
    if (v[c] == cplx(0.0, 0.0)) continue;
    const int mc = digit_magnetization(static_cast<Code>(c), sites);
    if (!m) m = mc;
    definite = *m == mc;
  }
  if (definite && m) {
    if (std::abs(v.norm() - 1.0) > 1e-10) throw std::invalid_argument("entanglement_entropy: state is not normalized");
    return Bipartition(sites, cut).entropy(v, *m);
  }
  return von_neumann_entropy(reduced_density_matrix(v, sites, cut));
}

double median_of(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of empty list");
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (x.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + upper);
}

double mad_of(const std::vector<double>& x) {
  const double med = median_of(x);
  std::vector<double> dev(x.size());
  std::transform(x.begin(), x.end(), dev.begin(), [med](double v) { return std::abs(v - med); });
  return median_of(dev);
}

EntropyScan entropy_scan(const EigenSystem& es, const SymmetrySector& sec, std::optional<int> cut,
                         std::optional<double> scar_threshold) {
  if (es.right.cols() != es.values.size() || es.right.rows() != static_cast<Eigen::Index>(sec.dim()))
    throw std::invalid_argument("entropy_scan: eigensystem lacks right vectors of this sector");
  EntropyScan scan;
  scan.cut = cut.value_or(sec.sites / 2);
  const Bipartition part(sec.sites, scan.cut);
  Vec full = Vec::Zero(static_cast<Eigen::Index>(pow3(sec.sites)));
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const Vec r = es.right.col(i).normalized();
    // Inline embedding into a reused buffer; only touched entries are reset.
    for (std::size_t k = 0; k < sec.dim(); ++k) {
      Code t = sec.reps[k];
      const cplx amp = r[static_cast<Eigen::Index>(k)] / sec.norms[k];
      for (int j = 0; j < sec.periods[k]; ++j) {
        full[static_cast<Eigen::Index>(t)] = amp * std::conj(sec.phase(j));
        t = translate_code(t, sec.sites);
      }
    }
    scan.eigen_index.push_back(static_cast<std::size_t>(i));
    scan.entropies.push_back(part.entropy(full, sec.magnetization));
    scan.eigenvalue_re.push_back(es.values[i].real());
    scan.eigenvalue_im.push_back(es.values[i].imag());
    for (std::size_t k = 0; k < sec.dim(); ++k) {
      Code t = sec.reps[k];
      for (int j = 0; j < sec.periods[k]; ++j) {
        full[static_cast<Eigen::Index>(t)] = 0.0;
        t = translate_code(t, sec.sites);
      }
    }
  }
  if (scan.entropies.empty()) return scan;
  scan.median = median_of(scan.entropies);
  scan.mad = mad_of(scan.entropies);
  scan.threshold = scar_threshold.value_or(scan.median - 3.0 * scan.mad);
  for (std::size_t i = 0; i < scan.entropies.size(); ++i)
    if (scan.entropies[i] < scan.threshold) scan.scar_candidates.push_back(i);
  return scan;
}

std::vector<double> eigenvector_overlaps(const EigenSystem& es, const Vec& target) {
  if (es.right.rows() != target.size()) throw std::invalid_argument("eigenvector_overlaps: dimension mismatch");
  const Vec t = target.normalized();
  std::vector<double> out(static_cast<std::size_t>(es.right.cols()));
  for (Eigen::Index i = 0; i < es.right.cols(); ++i)
    out[static_cast<std::size_t>(i)] = std::abs(t.dot(es.right.col(i))) / es.right.col(i).norm();
  return out;
}

}  // namespace spin1
