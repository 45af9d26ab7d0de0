#pragma once
#include <functional>
#include "levy/density.hpp"

namespace levy {

// State-modulated jump kernel
//   M(t,x,dy) = kappa(t,x) 1_{0<|y|<=1} |y|^{-d-beta'} dy
//             + eta(t,x) sum_j rate_j delta_{y_j}(dy),
// with bounded modulators carrying *declared* sup bounds. Atoms sit on
// |y_j| >= 1 so the small/big split is clean and the beta-moment bound has an
// exact closed form. alpha is the order of the driving process; it fixes the
// compensation rule inside K.
struct JumpKernelModel {
    int d = 1;
    double alpha = 0;
    double beta = 0;        // moment order, beta_prime < beta < alpha
    double beta_prime = 0;  // small-jump exponent, in (0, beta)
    std::function<double(double, const Vec&)> kappa;  // small-jump modulator
    std::function<double(double, const Vec&)> eta;    // big-jump modulator
    double kappa_sup = 0, eta_sup = 0;                // declared sup bounds
    std::vector<ExtraJump> big;                       // finite atomic part, |y_j| >= 1
    double delta_cut = 0;  // inner cutoff scale: density carries chi(|y|/delta_cut); 0 = none
};

// throws std::domain_error when a structural constraint is violated
void validate_kernel(const JumpKernelModel& M);

// smooth monotone ramp: 0 for s <= 1/2, 1 for s >= 1; the inner cutoff is
// chi(|y| / delta_cut), so jumps below delta_cut/2 are removed entirely
double cutoff_chi(double s);

// surface measure of the unit sphere S^{d-1}
double sphere_area(int d);

// B_M = sup_{t,x} int (1 ^ |y|^beta) M(t,x,dy)
//     = kappa_sup sigma_d / (beta - beta_prime) + eta_sup sum_j rate_j
double beta_moment_bound(const JumpKernelModel& M);

// K f plus the certificate for the discarded inner radial shell: the quadrature
// starts at rho_min, chosen so the certified bound on the [0, rho_min) mass
// (spectral l1 bounds on grad f resp. D^2 f) stays below tol.
struct KField {
    Field value;
    double rho_min = 0;
    double remainder = 0;
};

// K f(x) = kappa(t,x) int_{0<|y|<=1} [f(x+y) - f(x) - 1_{alpha>1} y.grad f(x)]
//            |y|^{-d-beta'} dy  +  eta(t,x) sum_j rate_j [f(x+y_j) - f(x)].
// grad (one field per axis) is mandatory when alpha > 1; field values off the
// lattice come from the periodic cubic interpolant. d in {1, 2}. A kernel with
// delta_cut > 0 integrates exactly from delta_cut/2 (remainder 0, no
// certificate needed).
KField apply_K(const Field& f, const JumpKernelModel& M, double t,
               const std::vector<Field>* grad = nullptr, double tol = 1e-8, int n_dir = 16);

}  // namespace levy
