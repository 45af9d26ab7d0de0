#include "levy/symbol.hpp"
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levy {

double c1_const() { return 1.0 - std::numbers::egamma; }

cplx h_alpha(double alpha, double s) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::domain_error("h_alpha: stability index must lie in (0,2)");
    if (s == 0.0) return {0.0, 0.0};
    double as = std::abs(s), sgn = (s > 0) ? 1.0 : -1.0;
    if (alpha == 1.0) {
        // (pi/2)|s| + i s log|s| - i c1 s
        return {0.5 * M_PI * as, s * std::log(as) - c1_const() * s};
    }
    // -Gamma(-alpha)|s|^alpha e^{-i sgn(s) pi alpha/2} plus the linear piece
    // from the cutoff in the compensator
    double mag = -std::tgamma(-alpha) * std::pow(as, alpha);
    double ph = -sgn * 0.5 * M_PI * alpha;
    cplx base = mag * cplx{std::cos(ph), std::sin(ph)};
    double lin = (alpha < 1.0) ? s / (1.0 - alpha) : -s / (alpha - 1.0);
    return base + cplx{0.0, lin};
}

cplx psi_stable(const Model& m, const Vec& u) {
    cplx s{0.0, 0.0};
    for (const auto& at : m.atoms) s += at.w * h_alpha(m.alpha, dot(u, at.dir));
    return s;
}

cplx psi_full(const Model& m, const Vec& u) {
    cplx s = psi_stable(m, u);
    if (!m.a.empty()) {
        double q = 0;
        for (int i = 0; i < m.d; ++i)
            for (int j = 0; j < m.d; ++j) q += m.a[i][j] * u[i] * u[j];
        s += q;
    }
    if (!m.b.empty()) s += cplx{0.0, -dot(m.b, u)};
    for (const auto& ej : m.extra) {
        double uy = dot(u, ej.y);
        cplx jump = cplx{std::cos(uy) - 1.0, std::sin(uy)};
        if (norm2(ej.y) <= 1.0) jump -= cplx{0.0, uy};
        s -= ej.rate * jump;
    }
    return s;
}

Vec gamma_vec(const Model& m) {
    Vec g(m.d, 0.0);
    for (const auto& at : m.atoms)
        for (int i = 0; i < m.d; ++i) g[i] += at.w * at.dir[i];
    if (m.alpha < 1.0)
        for (auto& v : g) v /= -(1.0 - m.alpha);
    else if (m.alpha > 1.0)
        for (auto& v : g) v /= (m.alpha - 1.0);
    return g;
}

}  // namespace levy
