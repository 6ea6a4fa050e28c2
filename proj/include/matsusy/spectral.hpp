#pragma once

// Finite-difference matrix Schrodinger operators, zero modes of a_k and the
// raising-operator ladder.

#include "matsusy/linalg.hpp"
#include "matsusy/superpotential.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace matsusy {

/// Uniform grid x_i = a + i h, h = (b - a) / (npoints - 1).
class GridDomain {
public:
    GridDomain(double a, double b, int npoints);

    double a() const { return a_; }
    double b() const { return b_; }
    int npoints() const { return npoints_; }
    double spacing() const { return (b_ - a_) / (npoints_ - 1); }
    double x(int i) const { return a_ + i * spacing(); }

    /// Same interval with h halved.
    GridDomain refined() const { return {a_, b_, 2 * npoints_ - 1}; }

private:
    double a_;
    double b_;
    int npoints_;
};

/// n-component function sampled on a grid; row i holds the spinor at x_i.
struct GridSpinor {
    GridDomain domain;
    CMatrix values;

    int dimension() const { return static_cast<int>(values.cols()); }
};

/// Trapezoid-rule inner product <psi, chi>.
Complex inner_product(const GridSpinor& psi, const GridSpinor& chi);
double l2_norm(const GridSpinor& psi);

/// Throws ZeroNormError for a vanishing spinor.
GridSpinor l2_normalize(const GridSpinor& psi);

/// Superpotential at fixed k, together with the window whose edges decide
/// which asymptotic directions are square-integrable.
struct SuperpotentialField {
    int dimension = 0;
    std::function<CMatrix(double)> w;
    Interval window;
};

/// W_k of a model; throws DomainError unless [a, b] lies in one validity window.
SuperpotentialField superpotential_field(const Model& model, double k, const GridDomain& domain);

/// Hermitian block-tridiagonal matrix: diagonal blocks 2/h^2 + V(x_i) + shift,
/// off-diagonal blocks -1/h^2 I. Dirichlet zeros sit one step outside [a, b].
class HamiltonianMatrix {
public:
    HamiltonianMatrix(int dimension, double spacing, std::vector<CMatrix> diagonal_blocks);

    int dimension() const { return dimension_; }
    int npoints() const { return static_cast<int>(blocks_.size()); }
    int size() const { return dimension_ * npoints(); }
    double spacing() const { return spacing_; }
    const CMatrix& block(int i) const { return blocks_.at(static_cast<std::size_t>(i)); }
    double coupling() const { return -1.0 / (spacing_ * spacing_); }

    CMatrix to_dense() const;
    CVector apply(const CVector& v) const;

private:
    int dimension_;
    double spacing_;
    std::vector<CMatrix> blocks_;
};

using PotentialFn = std::function<CMatrix(double)>;

HamiltonianMatrix discretize(const PotentialFn& potential, int dimension, double shift, const GridDomain& domain);

/// -d^2/dx^2 + V_k^-(x) + shift (or V_k^+ for Partner::Plus).
HamiltonianMatrix discretize(const Model& model, double k, double shift, const GridDomain& domain,
                             Partner partner = Partner::Minus);

/// The `count` smallest eigenvalues in ascending order (banded LAPACK solver).
std::vector<double> low_spectrum(const HamiltonianMatrix& h, int count);

/// <psi, H psi> / <psi, psi> with the plain Euclidean product of the matrix.
double rayleigh_quotient(const HamiltonianMatrix& h, const GridSpinor& psi);

struct ZeroModeOptions {
    double step_control = 0.01;     ///< RK4 substep keeps dt * ||W|| below this
    double match_tolerance = 1e-6;  ///< subspace distance accepted at the midpoint
    double reorth_growth = 1e8;     ///< re-orthonormalise once a column grows this much
    double overflow_guard = 1e200;
};

/// Orthonormal basis of solutions of psi' = -W psi that stay bounded toward
/// both edges of the field's window. May be empty.
std::vector<GridSpinor> zero_mode_basis(const SuperpotentialField& field, const GridDomain& domain,
                                        const ZeroModeOptions& options = {});
std::vector<GridSpinor> zero_mode_basis(const Model& model, double k, const GridDomain& domain,
                                        const ZeroModeOptions& options = {});

/// Fourth-order first derivative on the grid, one-sided at the two nodes nearest each end.
CMatrix grid_derivative(const GridSpinor& psi);

/// a^dagger psi = -psi' + W psi.
GridSpinor apply_raising(const SuperpotentialField& field, const GridSpinor& psi);
GridSpinor apply_raising(const Model& model, double k, const GridSpinor& psi);

/// a psi = psi' + W psi.
GridSpinor apply_lowering(const SuperpotentialField& field, const GridSpinor& psi);

/// ||a psi|| / ||psi||.
double zero_mode_residual(const SuperpotentialField& field, const GridSpinor& psi);

/// a_k^dag a_{k+1}^dag ... a_{k+n-1}^dag applied to each zero mode of W_{k+n},
/// normalised; throws EmptyLadderError if W_{k+n} has no zero modes.
std::vector<GridSpinor> excited_state(const Model& model, double k, int nlevel, const GridDomain& domain,
                                      const ZeroModeOptions& options = {});

/// e0 + (2kn + n^2) nu - 2 n mu.
double energy_ladder(const Model& model, double k, double e0, int nlevel);

/// max over the grid of || V_k^+ - V_{k+1}^- - C_k I ||_max, with C_k extracted on the same grid.
double partner_identity(const Model& model, double k, const GridDomain& domain);

/// (E(h) - E(h/2)) / (E(h/2) - E(h/4)) for the lowest eigenvalue.
double grid_convergence_ratio(const Model& model, double k, double shift, const GridDomain& domain);

struct SpectralReport {
    std::vector<double> eigenvalues;
    std::vector<double> ladder_predictions;
    double residual_zero_mode = std::numeric_limits<double>::quiet_NaN();
    double convergence_ratio = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace matsusy
