#include "matsusy/invariance.hpp"

#include "matsusy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace matsusy {

RhoThetaPhi rho_theta_phi(const NuClass& nu, double gamma, double x) {
    const double lambda = nu.lambda();
    switch (nu.branch()) {
    case NuBranch::PositiveLambda: {
        const double u = lambda * x + gamma;
        const double c = std::cos(u);
        if (std::abs(c) <= 1e-13) throw PoleError("phi = lambda tan(u) has a pole here");
        return {std::sin(2.0 * u) / (2.0 * lambda), c * c, lambda * std::tan(u)};
    }
    case NuBranch::NegativeLambda: {
        const double u = lambda * x + gamma;
        const double c = std::cosh(u);
        return {std::sinh(2.0 * u) / (2.0 * lambda), c * c, -lambda * std::tanh(u)};
    }
    case NuBranch::Zero: {
        const double s = x + gamma;
        if (std::abs(s) <= 1e-13 * std::max(1.0, std::abs(x))) throw PoleError("phi = -1/(x+gamma) has a pole here");
        return {-s, s * s, -1.0 / s};
    }
    }
    return {};
}

CMatrix resolvent_Q(const ResolventBasis& basis, double x) {
    const auto n = basis.cmat.rows();
    if (basis.cmat.cols() != n) throw std::invalid_argument("resolvent matrix must be square");
    const auto [rho, theta, phi] = rho_theta_phi(basis.nu, basis.gamma, x);

    const CMatrix nmat = -rho * CMatrix::Identity(n, n) + theta * basis.cmat;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (nmat + nmat.adjoint()));
    const RVector& ev = eig.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.cwiseAbs().minCoeff() <= 1e-12 * scale) {
        std::ostringstream os;
        os << "N(x) is singular at x = " << x;
        throw SingularMatrixError(os.str());
    }
    const CMatrix& v = eig.eigenvectors();
    CMatrix q = v * ev.cwiseInverse().asDiagonal() * v.adjoint();
    q.diagonal().array() += phi;
    return 0.5 * (q + q.adjoint());
}

SampleGrid SampleGrid::uniform(double a, double b, int count, double step) {
    if (count < 1 || !(step > 0.0)) throw std::invalid_argument("sample grid needs count >= 1 and step > 0");
    SampleGrid g;
    g.step = step;
    g.points.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        g.points.push_back(0.5 * (a + b));
        return g;
    }
    for (int i = 0; i < count; ++i) g.points.push_back(a + (b - a) * i / (count - 1));
    return g;
}

SampleGrid residual_grid(const Model& model, double a, double b, int count, double step) {
    if (!(b - a > 2.0 * step)) throw DomainError("residual grid narrower than the stencil");
    SampleGrid raw = SampleGrid::uniform(a + step, b - step, count, step);
    const auto poles = pole_set(model, a - step, b + step);
    SampleGrid g;
    g.step = step;
    for (double x : raw.points) {
        const bool near_pole = std::any_of(poles.begin(), poles.end(),
                                           [&](const Pole& p) { return std::abs(p.x - x) < step + 1e-6; });
        if (!near_pole) g.points.push_back(x);
    }
    return g;
}

namespace {

template <typename Residual>
ResidualReport scan(const SampleGrid& grid, Residual&& residual) {
    ResidualReport r;
    r.grid_spacing = grid.step;
    for (double x : grid.points) {
        const double v = residual(x);
        if (!(v <= r.max_abs)) {
            r.max_abs = v;
            r.argmax_x = x;
        }
    }
    return r;
}

CMatrix central_difference(const MatrixFn& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

ResidualReport resolvent_residual(const ResolventBasis& basis, const SampleGrid& grid) {
    const auto n = basis.cmat.rows();
    const double nu = basis.nu.nu();
    const MatrixFn q = [&](double x) { return resolvent_Q(basis, x); };
    return scan(grid, [&](double x) {
        const CMatrix qx = q(x);
        const CMatrix rhs = qx * qx + nu * CMatrix::Identity(n, n);
        return max_abs(central_difference(q, x, grid.step) - rhs);
    });
}

DeterminingResiduals residual_determining(const MatrixFn& q, const MatrixFn& p, double nu, double mu,
                                          const SampleGrid& grid) {
    DeterminingResiduals out;
    out.q = scan(grid, [&](double x) {
        const CMatrix qx = q(x);
        const CMatrix rhs = qx * qx + nu * CMatrix::Identity(qx.rows(), qx.cols());
        return max_abs(central_difference(q, x, grid.step) - rhs);
    });
    out.p = scan(grid, [&](double x) {
        const CMatrix qx = q(x);
        const CMatrix px = p(x);
        const CMatrix rhs = 0.5 * anticommutator(qx, px) - mu * CMatrix::Identity(px.rows(), px.cols());
        return max_abs(central_difference(p, x, grid.step) - rhs);
    });
    return out;
}

namespace {

void require_stencils_in_window(const Model& model, const SampleGrid& grid) {
    for (double x : grid.points) {
        const Interval w = validity_window(model, x);
        if (!w.contains(x - grid.step, x + grid.step)) {
            std::ostringstream os;
            os << "finite-difference stencil at x = " << x << " leaves the validity window (" << w.lo << ", "
               << w.hi << ")";
            throw DomainError(os.str());
        }
    }
}

}  // namespace

DeterminingResiduals residual_determining(const Model& model, const SampleGrid& grid) {
    require_stencils_in_window(model, grid);
    return residual_determining([&](double x) { return eval_Q(model, x); },
                                [&](double x) { return eval_P(model, x); }, model.nu(), model.mu(), grid);
}

CkMeasurement measure_Ck(const Model& model, double k, const SampleGrid& grid) {
    if (grid.points.empty()) throw DomainError("empty grid");
    const int n = model.dimension();
    std::vector<double> centre;
    centre.reserve(grid.points.size());

    CkMeasurement m;
    for (double x : grid.points) {
        const CMatrix delta = eval_V(model, k, x, Partner::Plus) - eval_V(model, k + 1.0, x, Partner::Minus);
        const double c = delta.trace().real() / n;
        centre.push_back(c);
        m.non_identity = std::max(m.non_identity, max_abs(delta - c * CMatrix::Identity(n, n)));
    }
    double sum = 0.0;
    for (double c : centre) sum += c;
    m.value = sum / static_cast<double>(centre.size());
    for (double c : centre) m.variation = std::max(m.variation, std::abs(c - m.value));
    return m;
}

double extract_Ck(const Model& model, double k, const SampleGrid& grid, double tol) {
    const CkMeasurement m = measure_Ck(model, k, grid);
    if (m.non_identity > tol || m.variation > tol) {
        std::ostringstream os;
        os << "shape invariance violated: off-identity " << m.non_identity << ", x-variation " << m.variation
           << " (tolerance " << tol << ")";
        throw NotShapeInvariantError(os.str());
    }
    return m.value;
}

double predicted_Ck(const Model& model, double k) {
    return (2.0 * k + 1.0) * model.nu() - 2.0 * model.mu();
}

}  // namespace matsusy
