#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spin1/operators.hpp"

namespace spin1 {

using LinearMap = std::function<Vec(const Vec&)>;

// Biorthogonal Krylov chain. The right chain |p_n> carries the evolving
// state, psi(t) = sum_n phi_n(t) |p_n>, with phi_n = <q_n|psi(t)>. The
// projected operator is tridiagonal:
//   H|p_n>  = b_{n+1}|p_{n+1}> + a_n|p_n> + c_n|p_{n-1}>
//   H^+|q_n> = c*_{n+1}|q_{n+1}> + a*_n|q_n> + b*_n|q_{n-1}>
// a, b, c all have length m; b[0] = c[0] = 0 are placeholders so that
// b[n], c[n] couple sites n-1 and n.
struct KrylovChain {
  std::vector<cplx> a;
  std::vector<cplx> b;
  std::vector<cplx> c;
  std::vector<Vec> right;  // |p_n>
  std::vector<Vec> left;   // |q_n>
  bool terminated_early = false;
  std::size_t breakdown_index = 0;  // first index that could not be built

  std::size_t length() const { return a.size(); }
  // m x m tridiagonal effective operator.
  Mat effective_operator() const;
  // max_{i,j} |<q_i|p_j> - delta_ij|
  double biorthogonality_defect() const;
  bool is_hermitian(double tol = 1e-9) const;
};

struct BiLanczosOptions {
  std::size_t max_length = 0;    // 0: run to the dimension
  double breakdown_tol = 1e-12;  // on |b c|, relative to the running coefficient scale squared
};

KrylovChain bilanczos(const LinearMap& apply, const LinearMap& apply_adjoint, const Vec& psi0,
                      BiLanczosOptions opts = {});
KrylovChain bilanczos(const SectorMatrix& h, const Vec& psi0, BiLanczosOptions opts = {});

// B = L + L^+ - diag(Re diag L) with L the inclusive lower triangle of A;
// returns the normalized sum of all eigenvectors of B, each with its first
// largest-modulus entry made real positive.
Vec equal_weight_initial_state(const SectorMatrix& a);
Mat lower_triangle_hermitian(const Mat& a);

struct ComplexityCurve {
  std::vector<double> times;
  std::vector<double> ck;               // normalized or raw, per `normalized`
  std::vector<double> ck_raw;           // sum n |phi_n|^2, inf once out of double range
  std::vector<double> ck_normalized;    // ck_raw / sum |phi_n|^2
  std::vector<double> amplitude_norms;  // sum |phi_n|^2, same caveat as ck_raw
  bool normalized = false;
  bool used_ode_fallback = false;
};

// phi(t) = exp(-i H_eff t) e_0 for every t. Amplification under a
// non-Hermitian H_eff quickly exceeds double range, so each phi is stored
// rescaled: the true amplitudes are exp(log_scale) * phi.
struct KrylovAmplitudes {
  std::vector<double> times;
  std::vector<Vec> phi;
  std::vector<double> log_scale;
  bool used_ode_fallback = false;
};

KrylovAmplitudes evolve_amplitudes(const KrylovChain& chain, std::span<const double> times);

// C_K(t) = sum_n n |phi_n(t)|^2, optionally divided by sum_n |phi_n(t)|^2.
ComplexityCurve krylov_complexity(const KrylovAmplitudes& amps, bool normalize);

// Default normalization: on for non-Hermitian chains, off for Hermitian.
ComplexityCurve krylov_complexity(const KrylovChain& chain, std::span<const double> times);

// Late-window plateau versus early peak, the two dynamical signatures used
// to tell integrable from chaotic spreading.
struct RegimeSignature {
  double global_max = 0.0;  // max over the whole curve
  double early_max = 0.0;   // max over [0, split)
  double late_mean = 0.0;   // mean over [split, end]
  bool plateau = false;     // (global_max - late_mean) < tol * global_max
  bool peak_then_decay = false;  // early_max > (1 + tol) * late_mean
};

RegimeSignature classify_complexity(const ComplexityCurve& curve, double split_time, double tolerance = 0.15);

}  // namespace spin1
