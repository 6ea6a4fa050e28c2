#include "matsusy/errors.hpp"
#include "matsusy/spectral.hpp"

#include <sstream>
#include <stdexcept>

namespace matsusy {

std::vector<GridSpinor> excited_state(const Model& model, double k, int nlevel, const GridDomain& domain,
                                      const ZeroModeOptions& options) {
    if (nlevel < 1) throw std::invalid_argument("excited_state needs nlevel >= 1");
    const auto ground = zero_mode_basis(model, k + nlevel, domain, options);
    if (ground.empty()) {
        std::ostringstream os;
        os << "no square-integrable zero mode at k = " << k + nlevel;
        throw EmptyLadderError(os.str());
    }

    std::vector<SuperpotentialField> chain;
    for (int j = nlevel - 1; j >= 0; --j) chain.push_back(superpotential_field(model, k + j, domain));

    std::vector<GridSpinor> out;
    for (const auto& psi0 : ground) {
        GridSpinor psi = psi0;
        for (const auto& field : chain) psi = apply_raising(field, psi);
        const double norm = l2_norm(psi);
        if (norm > 1e-10 * l2_norm(psi0)) out.push_back(l2_normalize(psi));
    }
    return out;
}

double energy_ladder(const Model& model, double k, double e0, int nlevel) {
    if (nlevel < 0) throw std::invalid_argument("energy_ladder needs nlevel >= 0");
    const double n = nlevel;
    return e0 + (2.0 * k * n + n * n) * model.nu() - 2.0 * n * model.mu();
}

}  // namespace matsusy
