#include "matsusy/errors.hpp"
#include "matsusy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace matsusy {

namespace {

constexpr int kStageLength = 8;

double operator_bound(const CMatrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Eigen-directions of W at an endpoint whose local behaviour stays square
// integrable toward that edge of the window. Near a finite edge at distance d,
// W ~ c/(x - edge) with c = w d and the solution behaves like |x - edge|^(-c);
// at an infinite edge only the sign of w matters.
CMatrix admissible_directions(const SuperpotentialField& field, double x_end, bool left_edge) {
    const CMatrix w = field.w(x_end);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (w + w.adjoint()));
    const double edge = left_edge ? field.window.lo : field.window.hi;
    const double distance = left_edge ? x_end - edge : edge - x_end;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j) {
        const double growth = left_edge ? eig.eigenvalues()(j) : -eig.eigenvalues()(j);
        const bool ok = std::isfinite(distance) ? growth * distance < 0.5 : growth < 0.0;
        if (ok) keep.push_back(j);
    }
    CMatrix dirs(w.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) dirs.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]);
    return dirs;
}

void check_growth(const CMatrix& y, double x, const ZeroModeOptions& opt) {
    if (!y.allFinite() || max_abs(y) > opt.overflow_guard) {
        std::ostringstream os;
        os << "zero-mode integration overflowed near x = " << x;
        throw StiffnessError(os.str());
    }
}

// Classical RK4 for Y' = -W(x) Y from x0 to x1 (either direction) with
// substeps keeping |dt| * ||W|| <= step_control.
void rk4_advance(const SuperpotentialField& field, double x0, double x1, CMatrix& y, const ZeroModeOptions& opt) {
    const double dir = x1 > x0 ? 1.0 : -1.0;
    double t = x0;
    while (dir * (x1 - t) > 0.0) {
        const double remaining = std::abs(x1 - t);
        double dt = std::min(remaining, opt.step_control / std::max(operator_bound(field.w(t)), 1e-300));
        for (int it = 0; it < 60; ++it) {
            if (operator_bound(field.w(t + dir * dt)) * dt <= 2.0 * opt.step_control) break;
            dt *= 0.5;
        }
        const double s = dir * dt;
        const bool last = dt >= remaining;
        const double t_end = last ? x1 : t + s;
        const double step = t_end - t;

        const CMatrix w0 = field.w(t);
        const CMatrix wm = field.w(t + 0.5 * step);
        const CMatrix w1 = field.w(t_end);
        const CMatrix k1 = -w0 * y;
        const CMatrix k2 = -wm * (y + 0.5 * step * k1);
        const CMatrix k3 = -wm * (y + 0.5 * step * k2);
        const CMatrix k4 = -w1 * (y + step * k3);
        y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t_end;
        check_growth(y, t, opt);
    }
}

// Values of one fundamental subspace at nodes from..to (inclusive), expressed
// in the basis that is orthonormal at `to`.
std::vector<CMatrix> integrate_side(const SuperpotentialField& field, const GridDomain& domain, int from, int to,
                                    CMatrix y, const ZeroModeOptions& opt) {
    const int dir = to > from ? 1 : -1;
    const int count = std::abs(to - from) + 1;
    std::vector<CMatrix> values(static_cast<std::size_t>(count));
    std::vector<std::size_t> stage(static_cast<std::size_t>(count));
    std::vector<CMatrix> r_factors;

    values[0] = y;
    stage[0] = 0;
    for (int s = 1; s < count; ++s) {
        rk4_advance(field, domain.x(from + (s - 1) * dir), domain.x(from + s * dir), y, opt);
        values[static_cast<std::size_t>(s)] = y;
        stage[static_cast<std::size_t>(s)] = r_factors.size();

        const double growth = y.colwise().norm().maxCoeff();
        if (growth > opt.reorth_growth || s % kStageLength == 0 || s == count - 1) {
            Eigen::HouseholderQR<CMatrix> qr(y);
            const CMatrix q = qr.householderQ() * CMatrix::Identity(y.rows(), y.cols());
            r_factors.push_back(q.adjoint() * y);
            y = q;
        }
    }

    // B_final = B_s R_s^{-1} R_{s+1}^{-1} ... ; accumulate the tail products backwards.
    const std::size_t stages = r_factors.size();
    std::vector<CMatrix> tail(stages + 1);
    const auto p = y.cols();
    tail[stages] = CMatrix::Identity(p, p);
    for (std::size_t s = stages; s-- > 0;) {
        tail[s] = r_factors[s].triangularView<Eigen::Upper>().solve(tail[s + 1]);
    }
    for (int s = 0; s < count; ++s) {
        auto& v = values[static_cast<std::size_t>(s)];
        v = v * tail[stage[static_cast<std::size_t>(s)]];
    }
    return values;
}

void orthonormalize(std::vector<GridSpinor>& set) {
    std::vector<GridSpinor> out;
    for (auto& psi : set) {
        const double before = l2_norm(psi);
        if (!(before > 0.0)) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : out) psi.values -= inner_product(e, psi) * e.values;
        }
        const double after = l2_norm(psi);
        if (after > 1e-8 * before) out.push_back({psi.domain, psi.values / after});
    }
    set = std::move(out);
}

}  // namespace

std::vector<GridSpinor> zero_mode_basis(const SuperpotentialField& field, const GridDomain& domain,
                                        const ZeroModeOptions& options) {
    const int npts = domain.npoints();
    const int mid = (npts - 1) / 2;

    const CMatrix left0 = admissible_directions(field, domain.a(), true);
    const CMatrix right0 = admissible_directions(field, domain.b(), false);
    if (left0.cols() == 0 || right0.cols() == 0) return {};

    const auto left = integrate_side(field, domain, 0, mid, left0, options);
    const auto right = integrate_side(field, domain, npts - 1, mid, right0, options);

    // Both sides are orthonormal at the midpoint; principal vectors with
    // vanishing angle span the intersection.
    const CMatrix& ql = left.back();
    const CMatrix& qr = right.back();
    Eigen::JacobiSVD<CMatrix> svd(ql.adjoint() * qr, Eigen::ComputeFullU | Eigen::ComputeFullV);

    std::vector<GridSpinor> modes;
    const auto pairs = std::min(ql.cols(), qr.cols());
    for (Eigen::Index j = 0; j < pairs; ++j) {
        const double cosine = std::min(1.0, svd.singularValues()(j));
        const double gap = std::sqrt(std::max(0.0, 2.0 - 2.0 * cosine));
        if (gap >= options.match_tolerance) continue;
        const CVector alpha = svd.matrixU().col(j);
        const CVector beta = svd.matrixV().col(j);

        GridSpinor psi{domain, CMatrix(npts, field.dimension)};
        for (int i = 0; i <= mid; ++i) psi.values.row(i) = (left[static_cast<std::size_t>(i)] * alpha).transpose();
        for (int i = mid + 1; i < npts; ++i) {
            psi.values.row(i) = (right[static_cast<std::size_t>(npts - 1 - i)] * beta).transpose();
        }
        modes.push_back(std::move(psi));
    }
    orthonormalize(modes);
    return modes;
}

std::vector<GridSpinor> zero_mode_basis(const Model& model, double k, const GridDomain& domain,
                                        const ZeroModeOptions& options) {
    return zero_mode_basis(superpotential_field(model, k, domain), domain, options);
}

}  // namespace matsusy
