#include "levy/density.hpp"
#include <cmath>
#include <stdexcept>

namespace levy {

namespace {

// density = (2pi)^{-d} int e^{-iux} e^{-t psi(u)} du: synthesize with the
// conjugate symbol (u -> -u), which also keeps the result real for real processes
Field invert_exponent(const Lattice& lat, const std::function<cplx(const Vec&)>& psi, double t,
                      InversionGuards* g) {
    SpectralVec table = symbol_table(lat, [&](const Vec& u) {
        Vec mu = scaled(-1.0, u);
        return std::exp(-t * psi(mu));
    });
    double mi = 0;
    Field p = synthesize(lat, table, &mi);
    if (g) fill_guards(p, table, mi, *g);
    return p;
}

}  // namespace

void fill_guards(const Field& p, const SpectralVec& table, double max_imag, InversionGuards& g) {
    const Lattice& lat = p.lat;
    int64_t sz = lat.size();
    std::vector<int> idx(lat.d);
    double tail = 0;
    for (int64_t m = 0; m < sz; ++m) {
        lat.unflatten(m, idx.data());
        bool boundary = false;
        for (int a = 0; a < lat.d; ++a)
            if (idx[a] == 0 || idx[a] == lat.n[a] - 1) boundary = true;
        if (boundary) tail = std::max(tail, std::abs(table[m]));
    }
    g.spectral_tail = tail;
    g.mass_defect = std::abs(mass(p) - 1.0);
    double pmax = 0, edge = 0, pmin = 0;
    for (int64_t k = 0; k < sz; ++k) {
        pmax = std::max(pmax, std::abs(p.v[k]));
        pmin = std::min(pmin, p.v[k]);
        lat.unflatten(k, idx.data());
        bool boundary = false;
        for (int a = 0; a < lat.d; ++a)
            if (idx[a] == 0 || idx[a] == lat.n[a] - 1) boundary = true;
        if (boundary) edge = std::max(edge, std::abs(p.v[k]));
    }
    g.edge_ratio = (pmax > 0) ? edge / pmax : 0.0;
    g.min_value = pmin;
    g.max_imag = max_imag;
}

Field stable_density(const Model& m, double t, const Lattice& lat, InversionGuards* g) {
    return invert_exponent(lat, [&](const Vec& u) { return psi_stable(m, u); }, t, g);
}

Field full_density(const Model& m, double t, const Lattice& lat, InversionGuards* g) {
    return invert_exponent(lat, [&](const Vec& u) { return psi_full(m, u); }, t, g);
}

double c3_constant(int d, double delta) {
    if (!(delta > 0.0 && delta < 2.0)) throw std::domain_error("c3: order must lie in (0,2)");
    return std::pow(2.0, delta) * std::pow(M_PI, -0.5 * d) * std::tgamma(0.5 * (d + delta)) /
           std::abs(std::tgamma(-0.5 * delta));
}

SpectralVec fractional_table(const Lattice& lat, double delta) {
    return symbol_table(lat, [&](const Vec& u) { return cplx{-std::pow(norm2(u), delta), 0.0}; });
}

SpectralVec gradient_table(const Lattice& lat, int axis) {
    return symbol_table(lat, [&](const Vec& u) { return cplx{0.0, u[axis]}; });
}

SpectralVec generator_table(const Lattice& lat, const Model& m) {
    return symbol_table(lat, [&](const Vec& u) { return -psi_full(m, u); });
}

SpectralVec semigroup_table(const Lattice& lat, const Model& m, double t) {
    return symbol_table(lat, [&](const Vec& u) { return std::exp(-t * psi_full(m, u)); });
}

SpectralVec stable_semigroup_table(const Lattice& lat, const Model& m, double t) {
    return symbol_table(lat, [&](const Vec& u) { return std::exp(-t * psi_stable(m, u)); });
}

}  // namespace levy
