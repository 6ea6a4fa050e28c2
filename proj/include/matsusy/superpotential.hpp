#pragma once

// Matrix superpotentials W_k = kQ + P with Q diagonal.
//
// Q solves the matrix Riccati equation Q' = Q^2 + nu and P the linear
// equation P' = {Q,P}/2 - mu.  Every entry is available in closed form, and
// the derivatives are taken from those two equations rather than by
// differentiating the closed forms.

#include "matsusy/linalg.hpp"

#include <limits>
#include <string_view>
#include <vector>

namespace matsusy {

enum class NuBranch { PositiveLambda, NegativeLambda, Zero };

/// Sign class of the Riccati constant: nu = lambda^2, -lambda^2 or 0.
class NuClass {
public:
    static NuClass positive(double lambda);
    static NuClass negative(double lambda);
    static NuClass zero();

    NuBranch branch() const { return branch_; }
    double lambda() const { return lambda_; }
    double nu() const;

private:
    NuClass(NuBranch branch, double lambda) : branch_(branch), lambda_(lambda) {}

    NuBranch branch_;
    double lambda_;
};

enum class QVariant { TanPole, Tanh, Coth, ConstPlus, ConstMinus, InvPole, ZeroEntry };

/// One diagonal channel of Q. `gamma` is ignored by the constant variants.
struct QEntry {
    QVariant variant = QVariant::ZeroEntry;
    double gamma = 0.0;
};

bool variant_has_gamma(QVariant v);
bool variant_compatible(QVariant v, NuBranch b);
std::string_view variant_name(QVariant v);
QVariant variant_from_name(std::string_view name);  // throws ConfigError

/// A complete shape-invariant family: nu class, diagonal Q, mu and the
/// hermitian matrix of integration constants phi.
///
/// The constructor validates every invariant and sorts the channels into
/// canonical block order (Tanh, Coth, ConstPlus, ConstMinus for nu < 0;
/// InvPole, ZeroEntry for nu = 0; ties broken by gamma), permuting phi along
/// with them.
class Model {
public:
    Model(NuClass nu, std::vector<QEntry> entries, double mu, CMatrix phi);

    int dimension() const { return static_cast<int>(entries_.size()); }
    const NuClass& nu_class() const { return nu_; }
    double nu() const { return nu_.nu(); }
    double lambda() const { return nu_.lambda(); }
    const std::vector<QEntry>& entries() const { return entries_; }
    const QEntry& entry(int i) const { return entries_.at(static_cast<std::size_t>(i)); }
    double mu() const { return mu_; }
    const CMatrix& phi() const { return phi_; }

private:
    NuClass nu_;
    std::vector<QEntry> entries_;
    double mu_;
    CMatrix phi_;
};

double q_value(const QEntry& entry, const NuClass& nu, double x);
double q_derivative(const QEntry& entry, const NuClass& nu, double x);

/// g^2 for the channel: the positive solution of y' = q y used by the
/// off-diagonal entries p_ij = phi_ij g_i g_j.
double homogeneous_weight(const QEntry& entry, const NuClass& nu, double x);

Complex p_value(const Model& model, int i, int j, double x);
Complex p_derivative(const Model& model, int i, int j, double x);

CMatrix eval_Q(const Model& model, double x);
CMatrix eval_P(const Model& model, double x);
CMatrix eval_W(const Model& model, double k, double x);
CMatrix eval_W_prime(const Model& model, double k, double x);

enum class Partner { Minus, Plus };

/// V_k^- = W^2 - W' (Partner::Minus) or V_k^+ = W^2 + W' (Partner::Plus).
CMatrix eval_V(const Model& model, double k, double x, Partner partner);

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return lo < x && x < hi; }
    bool contains(double a, double b) const { return lo < a && b < hi; }
};

/// Maximal open interval around x0 on which every entry of Q and P is finite
/// and real-analytic. Throws DomainError when x0 itself is not valid.
Interval validity_window(const Model& model, double x0);

struct Pole {
    double x;
    int channel;
};

/// Singular points of Q in [a, b], strictly increasing.
std::vector<Pole> pole_set(const Model& model, double a, double b);

}  // namespace matsusy
