#pragma once
#include "levy/lattice.hpp"
#include "levy/symbol.hpp"

namespace levy {

// diagnostics attached to a spectral inversion; all computable a posteriori
struct InversionGuards {
    double spectral_tail = 0;  // max |multiplier| over the boundary shell of the freq grid
    double mass_defect = 0;    // |total mass - 1|
    double edge_ratio = 0;     // max boundary |p| / max |p| (box-size adequacy)
    double min_value = 0;      // most negative value (ringing)
    double max_imag = 0;       // imaginary residue discarded on inversion
};

// density of the stable part of the process at time t (spectral inversion)
Field stable_density(const Model& m, double t, const Lattice& lat, InversionGuards* g = nullptr);

// density of the full process (quadratic + drift + finite-activity included)
Field full_density(const Model& m, double t, const Lattice& lat, InversionGuards* g = nullptr);

// normalization of the fractional length operator of order delta in dimension d;
// positive, paired with the Fourier multiplier -|u|^delta
double c3_constant(int d, double delta);

// multiplier tables
SpectralVec fractional_table(const Lattice& lat, double delta);       // -|u|^delta
SpectralVec gradient_table(const Lattice& lat, int axis);             // i u_a
SpectralVec generator_table(const Lattice& lat, const Model& m);      // -psi(u)
SpectralVec semigroup_table(const Lattice& lat, const Model& m, double t);         // e^{-t psi}
SpectralVec stable_semigroup_table(const Lattice& lat, const Model& m, double t);  // stable part only

// fill guard fields for a density obtained from `table`
void fill_guards(const Field& p, const SpectralVec& table, double max_imag, InversionGuards& g);

}  // namespace levy
