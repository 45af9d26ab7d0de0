#pragma once
#include <complex>
#include <vector>
#include "levy/vec.hpp"

namespace levy {

using cplx = std::complex<double>;

struct SpectralAtom {
    Vec dir;   // unit direction xi_j
    double w;  // weight
};

struct ExtraJump {
    Vec y;        // jump site
    double rate;  // finite-activity intensity
};

// Driving process: stable part (alpha, discrete spectral measure), optional
// diffusion matrix a (generator term sum_ij a_ij d_i d_j), drift b, and a
// finite-activity jump component.
struct Model {
    int d = 1;
    double alpha = 1.0;
    std::vector<SpectralAtom> atoms;
    std::vector<std::vector<double>> a;  // empty means zero
    Vec b;                               // empty means zero
    std::vector<ExtraJump> extra;
};

// centering constant of the alpha=1 radial integral: 1 - Euler gamma
double c1_const();

// One-ray building block: h(s) = -int_0^inf (e^{isr} - 1 - isr 1_{r<=1}) r^{-1-alpha} dr,
// evaluated in closed form. Re h >= 0. Throws std::domain_error outside 0<alpha<2.
cplx h_alpha(double alpha, double s);

// stable part of the exponent: sum_j w_j h(u . xi_j)
cplx psi_stable(const Model& m, const Vec& u);

// full exponent: quadratic part + drift + stable + finite-activity part;
// E exp(i u . S_t) = exp(-t psi(u))
cplx psi_full(const Model& m, const Vec& u);

// centering vector making psi_stable + i u.gamma positively homogeneous of
// order alpha (alpha != 1), or satisfying the log-scaling identity (alpha = 1)
Vec gamma_vec(const Model& m);

}  // namespace levy
