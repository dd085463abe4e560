#include "lapack.hpp"

#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "spin1/errors.hpp"

namespace spin1::lapack {

namespace {

std::string fingerprint(const Eigen::MatrixXcd& a) {
  return "dim=" + std::to_string(a.rows()) + " fro=" + std::to_string(a.norm()) +
         " trace=" + std::to_string(a.trace().real()) + "," + std::to_string(a.trace().imag());
}

}  // namespace

Eigen::VectorXd heev(Eigen::MatrixXcd& a, bool vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const std::string fp = fingerprint(a);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) throw NumericalError("zheevd failed (info=" + std::to_string(info) + ", " + fp + ")");
  return w;
}

Eigen::VectorXd syev_values(Eigen::MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) throw NumericalError("dsyevd failed (info=" + std::to_string(info) + ")");
  return w;
}

Eigen::VectorXcd geev(Eigen::MatrixXcd& a, Eigen::MatrixXcd* vr, Eigen::MatrixXcd* vl) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXcd w(n);
  if (n == 0) return w;
  const std::string fp = fingerprint(a);
  if (vr) vr->resize(n, n);
  if (vl) vl->resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, vl ? 'V' : 'N', vr ? 'V' : 'N', n, a.data(), n, w.data(),
                                        vl ? vl->data() : nullptr, vl ? n : 1, vr ? vr->data() : nullptr, vr ? n : 1);
  if (info != 0) throw NumericalError("zgeev failed to converge (info=" + std::to_string(info) + ", " + fp + ")");
  return w;
}

}  // namespace spin1::lapack
