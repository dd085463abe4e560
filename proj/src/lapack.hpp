#pragma once

// Thin wrappers over the LAPACK dense eigensolvers. Internal header.

#include <Eigen/Dense>

namespace spin1::lapack {

// Hermitian eigensolver (zheevd). `a` is overwritten by eigenvectors when
// vectors is set. Returns ascending eigenvalues. Throws NumericalError.
Eigen::VectorXd heev(Eigen::MatrixXcd& a, bool vectors);

// Real symmetric eigenvalues (dsyevd), values only.
Eigen::VectorXd syev_values(Eigen::MatrixXd& a);

// General complex eigensolver (zgeev). `a` is destroyed. vr / vl are resized
// and filled when requested.
Eigen::VectorXcd geev(Eigen::MatrixXcd& a, Eigen::MatrixXcd* vr, Eigen::MatrixXcd* vl);

}  // namespace spin1::lapack
