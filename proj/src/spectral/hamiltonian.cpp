#include "matsusy/errors.hpp"
#include "matsusy/invariance.hpp"
#include "matsusy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace matsusy {

HamiltonianMatrix::HamiltonianMatrix(int dimension, double spacing, std::vector<CMatrix> diagonal_blocks)
    : dimension_(dimension), spacing_(spacing), blocks_(std::move(diagonal_blocks)) {
    if (dimension < 1 || !(spacing > 0.0)) throw std::invalid_argument("invalid Hamiltonian shape");
    for (const auto& b : blocks_) {
        if (b.rows() != dimension || b.cols() != dimension) throw std::invalid_argument("block size mismatch");
    }
}

CMatrix HamiltonianMatrix::to_dense() const {
    const int n = dimension_;
    const int npts = npoints();
    CMatrix m = CMatrix::Zero(size(), size());
    for (int i = 0; i < npts; ++i) {
        m.block(i * n, i * n, n, n) = blocks_[static_cast<std::size_t>(i)];
        if (i + 1 < npts) {
            for (int c = 0; c < n; ++c) {
                m(i * n + c, (i + 1) * n + c) = coupling();
                m((i + 1) * n + c, i * n + c) = coupling();
            }
        }
    }
    return m;
}

CVector HamiltonianMatrix::apply(const CVector& v) const {
    if (v.size() != size()) throw std::invalid_argument("vector size does not match Hamiltonian");
    const int n = dimension_;
    const int npts = npoints();
    CVector out(v.size());
    for (int i = 0; i < npts; ++i) {
        auto seg = out.segment(i * n, n);
        seg = blocks_[static_cast<std::size_t>(i)] * v.segment(i * n, n);
        if (i > 0) seg += coupling() * v.segment((i - 1) * n, n);
        if (i + 1 < npts) seg += coupling() * v.segment((i + 1) * n, n);
    }
    return out;
}

HamiltonianMatrix discretize(const PotentialFn& potential, int dimension, double shift, const GridDomain& domain) {
    const double h = domain.spacing();
    const double kinetic = 2.0 / (h * h);
    std::vector<CMatrix> blocks;
    blocks.reserve(static_cast<std::size_t>(domain.npoints()));
    for (int i = 0; i < domain.npoints(); ++i) {
        CMatrix b = potential(domain.x(i));
        if (b.rows() != dimension || b.cols() != dimension) throw std::invalid_argument("potential has wrong size");
        b.diagonal().array() += shift;
        b.diagonal().array() += kinetic;
        blocks.push_back(std::move(b));
    }
    return {dimension, h, std::move(blocks)};
}

HamiltonianMatrix discretize(const Model& model, double k, double shift, const GridDomain& domain,
                             Partner partner) {
    (void)superpotential_field(model, k, domain);  // window check
    return discretize([&](double x) { return eval_V(model, k, x, partner); }, model.dimension(), shift, domain);
}

std::vector<double> low_spectrum(const HamiltonianMatrix& h, int count) {
    const int size = h.size();
    if (count < 1 || count > size) throw std::invalid_argument("eigenvalue count out of range");
    const int n = h.dimension();
    const int kd = n;  // intra-block couplings reach n-1, the -1/h^2 I blocks reach n
    const int ldab = kd + 1;

    // Upper band, column-major: ab(kd + i - j, j) = A(i, j).
    std::vector<std::complex<double>> ab(static_cast<std::size_t>(ldab) * size, 0.0);
    auto at = [&](int i, int j) -> std::complex<double>& {
        return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * ldab];
    };
    for (int blk = 0; blk < h.npoints(); ++blk) {
        const CMatrix& b = h.block(blk);
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r <= c; ++r) at(blk * n + r, blk * n + c) = b(r, c);
        }
        if (blk + 1 < h.npoints()) {
            for (int c = 0; c < n; ++c) at(blk * n + c, (blk + 1) * n + c) = h.coupling();
        }
    }

    std::vector<double> w(static_cast<std::size_t>(size));
    std::vector<lapack_int> ifail(static_cast<std::size_t>(size));
    std::complex<double> qdummy{};
    std::complex<double> zdummy{};
    lapack_int found = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_zhbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', size, kd, ab.data(), ldab, &qdummy, 1,
                                           0.0, 0.0, 1, count, abstol, &found, w.data(), &zdummy, 1, ifail.data());
    if (info != 0 || found != count) {
        std::ostringstream os;
        os << "banded eigensolver failed (info = " << info << ", found " << found << " of " << count << ")";
        throw ConvergenceError(os.str());
    }
    w.resize(static_cast<std::size_t>(count));
    std::sort(w.begin(), w.end());
    return w;
}

double rayleigh_quotient(const HamiltonianMatrix& h, const GridSpinor& psi) {
    if (psi.values.rows() != h.npoints() || psi.dimension() != h.dimension()) {
        throw std::invalid_argument("spinor does not match the Hamiltonian grid");
    }
    // Row-major flattening: node i, channel c -> i * n + c.
    CVector v(h.size());
    for (int i = 0; i < h.npoints(); ++i) v.segment(i * h.dimension(), h.dimension()) = psi.values.row(i).transpose();
    const double denom = v.squaredNorm();
    if (!(denom > 0.0)) throw ZeroNormError("Rayleigh quotient of a zero spinor");
    return v.dot(h.apply(v)).real() / denom;
}

double partner_identity(const Model& model, double k, const GridDomain& domain) {
    (void)superpotential_field(model, k, domain);
    (void)superpotential_field(model, k + 1.0, domain);
    SampleGrid grid;
    grid.step = domain.spacing();
    for (int i = 0; i < domain.npoints(); ++i) grid.points.push_back(domain.x(i));
    const double ck = extract_Ck(model, k, grid);

    const int n = model.dimension();
    double worst = 0.0;
    for (double x : grid.points) {
        const CMatrix d = eval_V(model, k, x, Partner::Plus) -
                          (eval_V(model, k + 1.0, x, Partner::Minus) + ck * CMatrix::Identity(n, n));
        worst = std::max(worst, max_abs(d));
    }
    return worst;
}

double grid_convergence_ratio(const Model& model, double k, double shift, const GridDomain& domain) {
    const GridDomain d1 = domain.refined();
    const GridDomain d2 = d1.refined();
    const double e0 = low_spectrum(discretize(model, k, shift, domain), 1).front();
    const double e1 = low_spectrum(discretize(model, k, shift, d1), 1).front();
    const double e2 = low_spectrum(discretize(model, k, shift, d2), 1).front();
    return (e0 - e1) / (e1 - e2);
}

}  // namespace matsusy
