#include "matsusy/errors.hpp"
#include "matsusy/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace matsusy {

GridDomain::GridDomain(double a, double b, int npoints) : a_(a), b_(b), npoints_(npoints) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw DomainError("grid domain needs finite a < b");
    if (npoints < 16) throw DomainError("grid domain needs at least 16 points");
}

Complex inner_product(const GridSpinor& psi, const GridSpinor& chi) {
    if (psi.values.rows() != chi.values.rows() || psi.values.cols() != chi.values.cols()) {
        throw std::invalid_argument("inner product of spinors on different grids");
    }
    const auto last = psi.values.rows() - 1;
    Complex s = 0.0;
    for (Eigen::Index i = 0; i <= last; ++i) {
        const double w = (i == 0 || i == last) ? 0.5 : 1.0;
        s += w * psi.values.row(i).dot(chi.values.row(i));
    }
    return s * psi.domain.spacing();
}

double l2_norm(const GridSpinor& psi) {
    return std::sqrt(std::max(0.0, inner_product(psi, psi).real()));
}

GridSpinor l2_normalize(const GridSpinor& psi) {
    const double norm = l2_norm(psi);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ZeroNormError("cannot normalise a spinor of zero norm");
    return {psi.domain, psi.values / norm};
}

SuperpotentialField superpotential_field(const Model& model, double k, const GridDomain& domain) {
    const Interval w = validity_window(model, 0.5 * (domain.a() + domain.b()));
    if (!w.contains(domain.a(), domain.b())) {
        std::ostringstream os;
        os << "grid [" << domain.a() << ", " << domain.b() << "] leaves the validity window (" << w.lo << ", "
           << w.hi << ")";
        throw DomainError(os.str());
    }
    return {model.dimension(), [model, k](double x) { return eval_W(model, k, x); }, w};
}

CMatrix grid_derivative(const GridSpinor& psi) {
    const CMatrix& f = psi.values;
    const auto n = f.rows();
    if (n < 5) throw DomainError("derivative stencil needs at least 5 points");
    const double h12 = 12.0 * psi.domain.spacing();
    CMatrix d(n, f.cols());
    for (Eigen::Index i = 2; i + 2 < n; ++i) {
        d.row(i) = (f.row(i - 2) - 8.0 * f.row(i - 1) + 8.0 * f.row(i + 1) - f.row(i + 2)) / h12;
    }
    d.row(0) = (-25.0 * f.row(0) + 48.0 * f.row(1) - 36.0 * f.row(2) + 16.0 * f.row(3) - 3.0 * f.row(4)) / h12;
    d.row(1) = (-3.0 * f.row(0) - 10.0 * f.row(1) + 18.0 * f.row(2) - 6.0 * f.row(3) + f.row(4)) / h12;
    d.row(n - 1) = (25.0 * f.row(n - 1) - 48.0 * f.row(n - 2) + 36.0 * f.row(n - 3) - 16.0 * f.row(n - 4) +
                    3.0 * f.row(n - 5)) / h12;
    d.row(n - 2) = (3.0 * f.row(n - 1) + 10.0 * f.row(n - 2) - 18.0 * f.row(n - 3) + 6.0 * f.row(n - 4) -
                    f.row(n - 5)) / h12;
    return d;
}

namespace {

CMatrix w_times_psi(const SuperpotentialField& field, const GridSpinor& psi) {
    if (psi.dimension() != field.dimension) throw std::invalid_argument("spinor/superpotential dimension mismatch");
    CMatrix out(psi.values.rows(), psi.values.cols());
    for (Eigen::Index i = 0; i < psi.values.rows(); ++i) {
        const double x = psi.domain.x(static_cast<int>(i));
        out.row(i) = (field.w(x) * psi.values.row(i).transpose()).transpose();
    }
    return out;
}

}  // namespace

GridSpinor apply_raising(const SuperpotentialField& field, const GridSpinor& psi) {
    return {psi.domain, w_times_psi(field, psi) - grid_derivative(psi)};
}

GridSpinor apply_raising(const Model& model, double k, const GridSpinor& psi) {
    return apply_raising(superpotential_field(model, k, psi.domain), psi);
}

GridSpinor apply_lowering(const SuperpotentialField& field, const GridSpinor& psi) {
    return {psi.domain, w_times_psi(field, psi) + grid_derivative(psi)};
}

double zero_mode_residual(const SuperpotentialField& field, const GridSpinor& psi) {
    const double norm = l2_norm(psi);
    if (!(norm > 0.0)) throw ZeroNormError("residual of a zero spinor");
    return l2_norm(apply_lowering(field, psi)) / norm;
}

}  // namespace matsusy
