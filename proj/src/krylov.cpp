#include "spin1/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "lapack.hpp"
#include "spin1/errors.hpp"

namespace spin1 {

namespace {

// v -= sum_i basis_i <dual_i|v>, two passes of classical Gram-Schmidt.
void biorthogonalize(Vec& v, const std::vector<Vec>& basis, const std::vector<Vec>& dual) {
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < basis.size(); ++i) v -= basis[i] * dual[i].dot(v);
}

}  // namespace

Mat KrylovChain::effective_operator() const {
  const auto m = static_cast<Eigen::Index>(length());
  Mat h = Mat::Zero(m, m);
  for (Eigen::Index n = 0; n < m; ++n) {
    h(n, n) = a[n];
    if (n > 0) {
      h(n, n - 1) = b[n];
      h(n - 1, n) = c[n];
    }
  }
  return h;
}

double KrylovChain::biorthogonality_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j) {
      const cplx g = left[i].dot(right[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

bool KrylovChain::is_hermitian(double tol) const {
  for (std::size_t n = 0; n < length(); ++n) {
    if (std::abs(a[n].imag()) > tol) return false;
    if (n > 0 && (std::abs(b[n] - c[n]) > tol || std::abs(b[n].imag()) > tol)) return false;
  }
  return true;
}

KrylovChain bilanczos(const LinearMap& apply, const LinearMap& apply_adjoint, const Vec& psi0, BiLanczosOptions opts) {
  const auto dim = static_cast<std::size_t>(psi0.size());
  if (dim == 0) throw std::invalid_argument("bilanczos: empty initial vector");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("bilanczos: initial vector must be normalized");
  const std::size_t max_len = opts.max_length == 0 ? dim : std::min(opts.max_length, dim);
  if (max_len < 1) throw std::invalid_argument("bilanczos: max_length must be >= 1");

  KrylovChain ch;
  ch.right.push_back(psi0);
  ch.left.push_back(psi0);
  ch.b.push_back(0.0);
  ch.c.push_back(0.0);
  double scale = 0.0;

  for (std::size_t n = 0;; ++n) {
    const Vec& p = ch.right[n];
    const Vec& q = ch.left[n];
    Vec pn = apply(p);
    Vec qn = apply_adjoint(q);
    const cplx an = q.dot(pn);
    ch.a.push_back(an);
    scale = std::max({scale, std::abs(an), pn.norm()});
    if (ch.length() == max_len) break;

    pn -= an * p;
    qn -= std::conj(an) * q;
    if (n > 0) {
      pn -= ch.c[n] * ch.right[n - 1];
      qn -= std::conj(ch.b[n]) * ch.left[n - 1];
    }
    biorthogonalize(pn, ch.right, ch.left);
    biorthogonalize(qn, ch.left, ch.right);

    const double bn = pn.norm();
    const cplx overlap = qn.dot(pn);  // = b_{n+1} c_{n+1}
    if (bn <= 1e-12 * scale || std::abs(overlap) <= opts.breakdown_tol * scale * scale) {
      ch.terminated_early = true;
      ch.breakdown_index = n + 1;
      break;
    }
    const cplx cn = overlap / bn;
    ch.b.push_back(bn);
    ch.c.push_back(cn);
    scale = std::max({scale, bn, std::abs(cn)});
    ch.right.push_back(pn / bn);
    ch.left.push_back(qn / std::conj(cn));
  }
  return ch;
}

KrylovChain bilanczos(const SectorMatrix& h, const Vec& psi0, BiLanczosOptions opts) {
  return bilanczos([&](const Vec& v) { return matvec(h, v); }, [&](const Vec& v) { return matvec_adjoint(h, v); },
                   psi0, opts);
}

Mat lower_triangle_hermitian(const Mat& a) {
  Mat b = a.triangularView<Eigen::StrictlyLower>();
  b += Mat(b.adjoint());
  for (Eigen::Index i = 0; i < a.rows(); ++i) b(i, i) = a(i, i).real();
  return b;
}

Vec equal_weight_initial_state(const SectorMatrix& a) {
  if (a.dim() < 1) throw std::invalid_argument("equal_weight_initial_state: empty sector");
  Mat b = lower_triangle_hermitian(a.dense());
  lapack::heev(b, true);
  // Eigenvector phases are arbitrary and, once B differs from A, change the
  // state. Fix them portably: the first entry of largest modulus is made
  // real and positive.
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const double top = b.col(j).cwiseAbs().maxCoeff();
    Eigen::Index i = 0;
    while (std::abs(b(i, j)) < top * (1.0 - 1e-12)) ++i;
    b.col(j) *= std::conj(b(i, j)) / std::abs(b(i, j));
  }
  Vec v = b.rowwise().sum();
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw NumericalError("equal_weight_initial_state: eigenvector sum vanished");
  return v / nrm;
}

namespace {

// Adaptive RK4 with step doubling for i d/dt phi = H phi.
class OdeStepper {
 public:
  explicit OdeStepper(const Mat& h) : h_(h), step_(0.01 / std::max(1.0, h.norm())) {}

  void advance(Vec& phi, double duration) {
    double done = 0.0;
    while (done < duration) {
      const double h = std::min(step_, duration - done);
      const Vec full = rk4(phi, h);
      const Vec half = rk4(rk4(phi, 0.5 * h), 0.5 * h);
      const double err = (half - full).norm() / 15.0 / std::max(1.0, half.norm());
      if (err > 1e-10 && h > 1e-12) {
        step_ = 0.5 * h;
        continue;
      }
      phi = half + (half - full) / 15.0;
      done += h;
      if (err < 1e-12) step_ = 1.5 * h;
    }
  }

 private:
  Vec deriv(const Vec& x) const { return cplx(0.0, -1.0) * (h_ * x); }
  Vec rk4(const Vec& x, double h) const {
    const Vec k1 = deriv(x);
    const Vec k2 = deriv(x + 0.5 * h * k1);
    const Vec k3 = deriv(x + 0.5 * h * k2);
    const Vec k4 = deriv(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  const Mat& h_;
  double step_;
};

}  // namespace

KrylovAmplitudes evolve_amplitudes(const KrylovChain& chain, std::span<const double> times) {
  if (chain.length() < 1) throw std::invalid_argument("evolve_amplitudes: empty chain");
  if (times.empty() || times.front() != 0.0 || !std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("evolve_amplitudes: time grid must be sorted and start at 0");
  const Mat heff = chain.effective_operator();
  const auto m = heff.rows();
  Vec e0 = Vec::Zero(m);
  e0[0] = 1.0;

  KrylovAmplitudes out;
  out.times.assign(times.begin(), times.end());
  out.phi.reserve(times.size());

  Mat vecs;
  Vec vals;
  Vec weights;
  bool spectral = true;
  if (chain.is_hermitian()) {
    Mat hs = heff;
    const Eigen::VectorXd w = lapack::heev(hs, true);
    vals = w.cast<cplx>();
    vecs = hs;
    weights = vecs.adjoint() * e0;
  } else {
    Mat work = heff;
    Mat vr;
    vals = lapack::geev(work, &vr, nullptr);
    vecs = vr;
    Eigen::FullPivLU<Mat> lu(vecs);
    weights = lu.solve(e0);
    if (lu.rcond() < 1e-12 || (vecs * weights - e0).norm() > 1e-10) spectral = false;
  }

  if (spectral) {
    double growth = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) growth = std::max(growth, vals[i].imag());
    for (double t : times) {
      Vec phase(m);
      for (Eigen::Index i = 0; i < m; ++i)
        phase[i] = std::exp(cplx(0.0, -t) * vals[i] - growth * t) * weights[i];
      out.phi.push_back(vecs * phase);
      out.log_scale.push_back(growth * t);
    }
    return out;
  }

  out.used_ode_fallback = true;
  OdeStepper stepper(heff);
  Vec phi = e0;
  double now = 0.0, log_scale = 0.0;
  for (double t : times) {
    stepper.advance(phi, t - now);
    now = t;
    const double nrm = phi.norm();
    if (nrm > 0.0) {
      phi /= nrm;
      log_scale += std::log(nrm);
    }
    out.phi.push_back(phi);
    out.log_scale.push_back(log_scale);
  }
  return out;
}

ComplexityCurve krylov_complexity(const KrylovAmplitudes& amps, bool normalize) {
  ComplexityCurve c;
  c.times = amps.times;
  c.normalized = normalize;
  c.used_ode_fallback = amps.used_ode_fallback;
  for (std::size_t k = 0; k < amps.phi.size(); ++k) {
    const Vec& phi = amps.phi[k];
    double total = 0.0, weighted = 0.0;
    for (Eigen::Index n = 0; n < phi.size(); ++n) {
      const double w = std::norm(phi[n]);
      total += w;
      weighted += static_cast<double>(n) * w;
    }
    if (!(total > 0.0) || !std::isfinite(total) || !std::isfinite(weighted))
      throw NumericalError("krylov_complexity: amplitude norm is zero or not finite at time index " +
                           std::to_string(k) + " (t=" + std::to_string(amps.times[k]) + ")");
    const double scale = amps.log_scale.empty() ? 1.0 : std::exp(2.0 * amps.log_scale[k]);
    if (!normalize && !std::isfinite(weighted * scale))
      throw NumericalError("krylov_complexity: unnormalized complexity overflows at t=" +
                           std::to_string(amps.times[k]) + "; use the normalized curve");
    c.amplitude_norms.push_back(total * scale);
    c.ck_raw.push_back(weighted * scale);
    c.ck_normalized.push_back(weighted / total);
  }
  c.ck = normalize ? c.ck_normalized : c.ck_raw;
  return c;
}

ComplexityCurve krylov_complexity(const KrylovChain& chain, std::span<const double> times) {
  return krylov_complexity(evolve_amplitudes(chain, times), !chain.is_hermitian());
}

RegimeSignature classify_complexity(const ComplexityCurve& curve, double split_time, double tolerance) {
  if (curve.times.empty()) throw std::invalid_argument("classify_complexity: empty curve");
  RegimeSignature sig;
  double late_sum = 0.0;
  std::size_t late_count = 0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double v = curve.ck[i];
    sig.global_max = std::max(sig.global_max, v);
    if (curve.times[i] < split_time) {
      sig.early_max = std::max(sig.early_max, v);
    } else {
      late_sum += v;
      ++late_count;
    }
  }
  if (late_count == 0) throw std::invalid_argument("classify_complexity: no samples after the split time");
  sig.late_mean = late_sum / static_cast<double>(late_count);
  sig.plateau = (sig.global_max - sig.late_mean) < tolerance * sig.global_max;
  sig.peak_then_decay = sig.early_max > (1.0 + tolerance) * sig.late_mean;
  return sig;
}

}  // namespace spin1
