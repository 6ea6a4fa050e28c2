#pragma once

#include <Eigen/Dense>

#include <complex>

namespace matsusy {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Largest absolute entry; the max-norm used throughout residual reports.
inline double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const CMatrix& m) {
    return max_abs(m - m.adjoint());
}

inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
    return a * b + b * a;
}

}  // namespace matsusy
