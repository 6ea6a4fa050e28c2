#pragma once

// Residual checks of the determining equations and of shape invariance, plus
// the resolvent construction of Q used as an independent oracle.

#include "matsusy/linalg.hpp"
#include "matsusy/superpotential.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace matsusy {

struct RhoThetaPhi {
    double rho;
    double theta;
    double phi;
};

/// Scalar functions of the linearised Riccati equation N' = -I - 2 phi N.
/// For nu = 0 this returns rho = -(x + gamma), the branch that actually solves it.
RhoThetaPhi rho_theta_phi(const NuClass& nu, double gamma, double x);

/// Q = phi I + N^{-1} with N = -rho I + theta C.
struct ResolventBasis {
    NuClass nu;
    double gamma;
    CMatrix cmat;
};

/// Throws SingularMatrixError when N(x) is not invertible.
CMatrix resolvent_Q(const ResolventBasis& basis, double x);

struct ResidualReport {
    double max_abs = 0.0;
    double argmax_x = std::numeric_limits<double>::quiet_NaN();
    double grid_spacing = 0.0;
};

/// Evaluation points plus the central-difference step used at each of them.
struct SampleGrid {
    std::vector<double> points;
    double step = 1e-3;

    static SampleGrid uniform(double a, double b, int count, double step);
};

/// Uniform grid on [a + step, b - step] with points closer than step + 1e-6 to
/// a pole of Q removed.
SampleGrid residual_grid(const Model& model, double a, double b, int count, double step);

using MatrixFn = std::function<CMatrix(double)>;

/// max over the grid of || central-difference(Q) - (Q^2 + nu) ||_max.
ResidualReport resolvent_residual(const ResolventBasis& basis, const SampleGrid& grid);

struct DeterminingResiduals {
    ResidualReport q;
    ResidualReport p;
};

/// Finite-difference residuals of Q' = Q^2 + nu and P' = {Q,P}/2 - mu for
/// arbitrary matrix functions; used to test deliberately broken families.
DeterminingResiduals residual_determining(const MatrixFn& q, const MatrixFn& p, double nu, double mu,
                                          const SampleGrid& grid);

/// Throws DomainError if some stencil leaves the validity window.
DeterminingResiduals residual_determining(const Model& model, const SampleGrid& grid);

/// Diagnostics of Delta(x) = (W_k^2 + W_k') - (W_{k+1}^2 - W_{k+1}').
struct CkMeasurement {
    double value = 0.0;          ///< mean of the diagonal of Delta over the grid
    double non_identity = 0.0;   ///< max |Delta(x) - c(x) I|, c(x) = tr Delta(x) / n
    double variation = 0.0;      ///< max |c(x) - value|
};

CkMeasurement measure_Ck(const Model& model, double k, const SampleGrid& grid);

/// Empirical shape-invariance constant. Throws NotShapeInvariantError when
/// Delta is not a constant multiple of the identity within `tol`.
double extract_Ck(const Model& model, double k, const SampleGrid& grid, double tol = 1e-9);

/// (2k + 1) nu - 2 mu.
double predicted_Ck(const Model& model, double k);

}  // namespace matsusy
