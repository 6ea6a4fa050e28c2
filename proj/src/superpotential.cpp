#include "matsusy/superpotential.hpp"

#include "matsusy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace matsusy {

namespace {

constexpr double kPoleTol = 1e-13;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void throw_pole(std::string_view what, double x) {
    std::ostringstream os;
    os << what << " pole at x = " << x;
    throw PoleError(os.str());
}

double phase(const QEntry& e, const NuClass& nu, double x) {
    return nu.lambda() * x + e.gamma;
}

// Distance (in u) from u to the nearest zero of cos u.
double tan_pole_gap(double u) {
    return std::abs(std::remainder(u - kPi / 2, kPi));
}

void check_regular(const QEntry& e, const NuClass& nu, double x) {
    switch (e.variant) {
    case QVariant::TanPole: {
        const double u = phase(e, nu, x);
        if (tan_pole_gap(u) <= kPoleTol * std::max(1.0, std::abs(u))) throw_pole("tan", x);
        break;
    }
    case QVariant::Coth: {
        const double u = phase(e, nu, x);
        if (std::abs(u) <= kPoleTol) throw_pole("coth", x);
        break;
    }
    case QVariant::InvPole:
        if (std::abs(x + e.gamma) <= kPoleTol * std::max(1.0, std::abs(x))) throw_pole("1/(x+gamma)", x);
        break;
    default:
        break;
    }
}

double particular_p(const QEntry& e, const NuClass& nu, double mu, double x) {
    const double lambda = nu.lambda();
    switch (e.variant) {
    case QVariant::TanPole:
        return -(mu / lambda) * std::tan(phase(e, nu, x));
    case QVariant::Tanh:
        return -(mu / lambda) * std::tanh(phase(e, nu, x));
    case QVariant::Coth:
        return -(mu / lambda) / std::tanh(phase(e, nu, x));
    case QVariant::ConstPlus:
        return mu / lambda;
    case QVariant::ConstMinus:
        return -mu / lambda;
    case QVariant::InvPole:
        return -mu * x * (x + 2.0 * e.gamma) / (2.0 * (x + e.gamma));
    case QVariant::ZeroEntry:
        return -mu * x;
    }
    return 0.0;
}

int block_rank(QVariant v) {
    return static_cast<int>(v);
}

bool same_function(const QEntry& a, const QEntry& b) {
    if (a.variant != b.variant) return false;
    if (!variant_has_gamma(a.variant)) return true;
    if (a.variant == QVariant::TanPole) return std::abs(std::remainder(a.gamma - b.gamma, kPi)) < 1e-14;
    return a.gamma == b.gamma;
}

}  // namespace

NuClass NuClass::positive(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    return {NuBranch::PositiveLambda, lambda};
}

NuClass NuClass::negative(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    return {NuBranch::NegativeLambda, lambda};
}

NuClass NuClass::zero() {
    return {NuBranch::Zero, 0.0};
}

double NuClass::nu() const {
    switch (branch_) {
    case NuBranch::PositiveLambda:
        return lambda_ * lambda_;
    case NuBranch::NegativeLambda:
        return -lambda_ * lambda_;
    case NuBranch::Zero:
        return 0.0;
    }
    return 0.0;
}

bool variant_has_gamma(QVariant v) {
    return v == QVariant::TanPole || v == QVariant::Tanh || v == QVariant::Coth || v == QVariant::InvPole;
}

bool variant_compatible(QVariant v, NuBranch b) {
    switch (v) {
    case QVariant::TanPole:
        return b == NuBranch::PositiveLambda;
    case QVariant::Tanh:
    case QVariant::Coth:
    case QVariant::ConstPlus:
    case QVariant::ConstMinus:
        return b == NuBranch::NegativeLambda;
    case QVariant::InvPole:
    case QVariant::ZeroEntry:
        return b == NuBranch::Zero;
    }
    return false;
}

std::string_view variant_name(QVariant v) {
    switch (v) {
    case QVariant::TanPole: return "tan_pole";
    case QVariant::Tanh: return "tanh";
    case QVariant::Coth: return "coth";
    case QVariant::ConstPlus: return "const_plus";
    case QVariant::ConstMinus: return "const_minus";
    case QVariant::InvPole: return "inv_pole";
    case QVariant::ZeroEntry: return "zero";
    }
    return "?";
}

QVariant variant_from_name(std::string_view name) {
    for (QVariant v : {QVariant::TanPole, QVariant::Tanh, QVariant::Coth, QVariant::ConstPlus,
                       QVariant::ConstMinus, QVariant::InvPole, QVariant::ZeroEntry}) {
        if (variant_name(v) == name) return v;
    }
    throw ConfigError("unknown Q variant '" + std::string(name) + "'");
}

Model::Model(NuClass nu, std::vector<QEntry> entries, double mu, CMatrix phi)
    : nu_(nu), mu_(mu) {
    const auto n = static_cast<Eigen::Index>(entries.size());
    if (n < 2) throw std::invalid_argument("model dimension must be at least 2");
    if (phi.rows() != n || phi.cols() != n) throw std::invalid_argument("phi must be n x n");
    if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
    if (!phi.allFinite()) throw std::invalid_argument("phi must be finite");

    const double scale = std::max(1.0, max_abs(phi));
    if (hermiticity_defect(phi) > 1e-12 * scale) throw std::invalid_argument("phi must be hermitian");

    for (auto& e : entries) {
        if (!variant_compatible(e.variant, nu.branch())) {
            throw std::invalid_argument("Q variant '" + std::string(variant_name(e.variant)) +
                                        "' does not belong to this nu class");
        }
        if (!variant_has_gamma(e.variant)) e.gamma = 0.0;
        if (!std::isfinite(e.gamma)) throw std::invalid_argument("gamma must be finite");
    }

    bool distinct = false;
    for (std::size_t i = 1; i < entries.size() && !distinct; ++i) distinct = !same_function(entries[0], entries[i]);
    if (!distinct) throw std::invalid_argument("Q is proportional to the unit matrix (reducible superpotential)");

    std::vector<Eigen::Index> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const auto& ea = entries[static_cast<std::size_t>(a)];
        const auto& eb = entries[static_cast<std::size_t>(b)];
        if (block_rank(ea.variant) != block_rank(eb.variant)) return block_rank(ea.variant) < block_rank(eb.variant);
        return ea.gamma < eb.gamma;
    });

    entries_.reserve(entries.size());
    phi_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        entries_.push_back(entries[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
        for (Eigen::Index j = 0; j < n; ++j) {
            phi_(i, j) = phi(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
    }
    phi_ = 0.5 * (phi_ + phi_.adjoint()).eval();
    for (Eigen::Index i = 0; i < n; ++i) phi_(i, i) = phi_(i, i).real();
}

double q_value(const QEntry& e, const NuClass& nu, double x) {
    if (!variant_compatible(e.variant, nu.branch())) throw std::invalid_argument("variant/nu class mismatch");
    check_regular(e, nu, x);
    const double lambda = nu.lambda();
    switch (e.variant) {
    case QVariant::TanPole:
        return lambda * std::tan(phase(e, nu, x));
    case QVariant::Tanh:
        return -lambda * std::tanh(phase(e, nu, x));
    case QVariant::Coth:
        return -lambda / std::tanh(phase(e, nu, x));
    case QVariant::ConstPlus:
        return lambda;
    case QVariant::ConstMinus:
        return -lambda;
    case QVariant::InvPole:
        return -1.0 / (x + e.gamma);
    case QVariant::ZeroEntry:
        return 0.0;
    }
    return 0.0;
}

double q_derivative(const QEntry& e, const NuClass& nu, double x) {
    const double q = q_value(e, nu, x);
    return q * q + nu.nu();
}

double homogeneous_weight(const QEntry& e, const NuClass& nu, double x) {
    check_regular(e, nu, x);
    const double lambda = nu.lambda();
    switch (e.variant) {
    case QVariant::TanPole:
        return 1.0 / std::cos(phase(e, nu, x));
    case QVariant::Tanh:
        return 1.0 / std::cosh(phase(e, nu, x));
    case QVariant::Coth:
        return 1.0 / std::sinh(phase(e, nu, x));
    case QVariant::ConstPlus:
        return std::exp(lambda * x);
    case QVariant::ConstMinus:
        return std::exp(-lambda * x);
    case QVariant::InvPole:
        return 1.0 / (x + e.gamma);
    case QVariant::ZeroEntry:
        return 1.0;
    }
    return 1.0;
}

Complex p_value(const Model& model, int i, int j, double x) {
    const int n = model.dimension();
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("channel index out of range");
    const auto& ei = model.entry(i);
    if (i == j) {
        return particular_p(ei, model.nu_class(), model.mu(), x) +
               model.phi()(i, i) * homogeneous_weight(ei, model.nu_class(), x);
    }
    const double gi = homogeneous_weight(ei, model.nu_class(), x);
    const double gj = homogeneous_weight(model.entry(j), model.nu_class(), x);
    const Complex c = model.phi()(i, j);
    if (c == Complex{}) return {};
    if (!(gi > 0.0) || !(gj > 0.0)) {
        std::ostringstream os;
        os << "square-root argument non-positive for p(" << i << "," << j << ") at x = " << x;
        throw DomainError(os.str());
    }
    return c * std::sqrt(gi) * std::sqrt(gj);
}

Complex p_derivative(const Model& model, int i, int j, double x) {
    const auto& nu = model.nu_class();
    const double qi = q_value(model.entry(i), nu, x);
    const double qj = q_value(model.entry(j), nu, x);
    Complex d = 0.5 * (qi + qj) * p_value(model, i, j, x);
    if (i == j) d -= model.mu();
    return d;
}

CMatrix eval_Q(const Model& model, double x) {
    const int n = model.dimension();
    CMatrix q = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) q(i, i) = q_value(model.entry(i), model.nu_class(), x);
    return q;
}

CMatrix eval_P(const Model& model, double x) {
    const int n = model.dimension();
    CMatrix p(n, n);
    for (int i = 0; i < n; ++i) {
        p(i, i) = p_value(model, i, i, x).real();
        for (int j = i + 1; j < n; ++j) {
            p(i, j) = p_value(model, i, j, x);
            p(j, i) = std::conj(p(i, j));
        }
    }
    return p;
}

CMatrix eval_W(const Model& model, double k, double x) {
    CMatrix w = eval_P(model, x);
    for (int i = 0; i < model.dimension(); ++i) w(i, i) += k * q_value(model.entry(i), model.nu_class(), x);
    return w;
}

CMatrix eval_W_prime(const Model& model, double k, double x) {
    const int n = model.dimension();
    const CMatrix p = eval_P(model, x);
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = q_value(model.entry(i), model.nu_class(), x);

    CMatrix d(n, n);
    for (int i = 0; i < n; ++i) {
        const double qi = q[static_cast<std::size_t>(i)];
        d(i, i) = k * (qi * qi + model.nu()) + qi * p(i, i).real() - model.mu();
        for (int j = i + 1; j < n; ++j) {
            d(i, j) = 0.5 * (qi + q[static_cast<std::size_t>(j)]) * p(i, j);
            d(j, i) = std::conj(d(i, j));
        }
    }
    return d;
}

CMatrix eval_V(const Model& model, double k, double x, Partner partner) {
    const CMatrix w = eval_W(model, k, x);
    const CMatrix dw = eval_W_prime(model, k, x);
    CMatrix v = w * w;
    if (partner == Partner::Minus) {
        v -= dw;
    } else {
        v += dw;
    }
    // W^2 is hermitian in exact arithmetic; remove the rounding asymmetry.
    return 0.5 * (v + v.adjoint());
}

namespace {

// Nearest singularities of one channel strictly below/above x0.
void channel_poles(const QEntry& e, const NuClass& nu, double x0, double& below, double& above) {
    const double lambda = nu.lambda();
    switch (e.variant) {
    case QVariant::TanPole: {
        const double u0 = lambda * x0 + e.gamma;
        const double m = std::ceil((u0 - kPi / 2) / kPi);
        double u_hi = kPi / 2 + m * kPi;
        if (u_hi <= u0) u_hi += kPi;
        below = std::max(below, (u_hi - kPi - e.gamma) / lambda);
        above = std::min(above, (u_hi - e.gamma) / lambda);
        break;
    }
    case QVariant::Coth: {
        const double p = -e.gamma / lambda;
        if (p < x0) below = std::max(below, p);
        else above = std::min(above, p);
        break;
    }
    case QVariant::InvPole: {
        const double p = -e.gamma;
        if (p < x0) below = std::max(below, p);
        else above = std::min(above, p);
        break;
    }
    default:
        break;
    }
}

}  // namespace

Interval validity_window(const Model& model, double x0) {
    try {
        (void)eval_Q(model, x0);
        (void)eval_P(model, x0);
    } catch (const PoleError& e) {
        throw DomainError(std::string("invalid window anchor: ") + e.what());
    }
    Interval w;
    for (const auto& e : model.entries()) channel_poles(e, model.nu_class(), x0, w.lo, w.hi);
    return w;
}

std::vector<Pole> pole_set(const Model& model, double a, double b) {
    std::vector<Pole> poles;
    const double lambda = model.lambda();
    for (int i = 0; i < model.dimension(); ++i) {
        const auto& e = model.entry(i);
        switch (e.variant) {
        case QVariant::TanPole: {
            // u = lambda x + gamma = pi/2 + m pi
            const double m_lo = std::ceil((lambda * a + e.gamma - kPi / 2) / kPi);
            const double m_hi = std::floor((lambda * b + e.gamma - kPi / 2) / kPi);
            for (double m = m_lo; m <= m_hi; m += 1.0) poles.push_back({(kPi / 2 + m * kPi - e.gamma) / lambda, i});
            break;
        }
        case QVariant::Coth: {
            const double p = -e.gamma / lambda;
            if (a <= p && p <= b) poles.push_back({p, i});
            break;
        }
        case QVariant::InvPole: {
            const double p = -e.gamma;
            if (a <= p && p <= b) poles.push_back({p, i});
            break;
        }
        default:
            break;
        }
    }
    std::sort(poles.begin(), poles.end(), [](const Pole& l, const Pole& r) {
        return l.x < r.x || (l.x == r.x && l.channel < r.channel);
    });
    // Coincident singularities from different channels collapse to one location.
    std::vector<Pole> unique;
    for (const auto& p : poles) {
        if (unique.empty() || p.x > unique.back().x) unique.push_back(p);
    }
    return unique;
}

}  // namespace matsusy
