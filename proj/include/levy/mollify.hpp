#pragma once
#include "levy/jump_kernel.hpp"

namespace levy {

// Discrete quadrature rule for the normalized unit-ball bump
// e^{-1/(1-|z|^2)}, rescaled to support radius 1/n. Weights are positive and
// sum to one, nodes come in antipodal pairs, and sum w|z| <= 1/n, so the rule
// is itself a valid mollifying measure: every certified inequality below holds
// for it verbatim, not just in the continuum limit.
struct Mollifier {
    int d = 1;
    int n = 1;
    std::vector<Vec> z;
    Vec w;
};

// d in {1, 2}; order is the radial Gauss-Legendre order (32 reproduces the
// continuum moments of the bump to ~1e-10)
Mollifier make_mollifier(int d, int n, int order = 32);

// sum_i w_i |z_i|, the first absolute moment of the rule
double abs_moment(const Mollifier& phi);

// kernel with kappa and eta replaced by their convolutions through the bump
// rule; sup bounds, atoms and exponents are unchanged, so the beta-moment
// bound is preserved
JumpKernelModel mollify_kernel(const JumpKernelModel& M, int n);

struct ErrorPair {
    double measured = 0;
    double bound = 0;
};

// sup over lattice points of |K_n f - (K f) * phi_n| where K_n uses the
// mollified kernel and the convolution acts on the output of K; certified
// against 4 n^{-1} c3 B_M with c3 a declared bound on f and its first three
// derivatives. Gradients for the compensated branch are built spectrally.
ErrorPair mollify_error(const Field& f, double c3, const JumpKernelModel& M, int n,
                        double t = 0);

// copy of M with the inner cutoff installed; delta_cut must lie in (0, 1)
JumpKernelModel truncate_kernel(const JumpKernelModel& M, double delta_cut);

// int_{delta/2}^{1} chi(r/delta) r^{-1-bp} dr: the per-direction jump rate of
// the truncated radial family. Scale covariant: delta^{bp} (mass + 1/bp) does
// not depend on delta.
double truncated_radial_mass(double beta_prime, double delta_cut);

// int_{delta/2}^{1} chi(r/delta) r^{-bp} dr: the |y| <= 1 first-moment of one
// ray of the truncated family (what a one-sided law would compensate)
double compensator_ray(double beta_prime, double delta_cut);

// Lambda(t,x): total jump rate of the truncated kernel, finite once
// delta_cut > 0 (throws domain_error otherwise)
double total_mass(const JumpKernelModel& M, double t, const Vec& x);

// closed-form ceiling for Lambda over all (t,x):
//   kappa_sup sigma_d ((delta/2)^{-bp} - 1)/bp + eta_sup sum rates
double total_mass_bound(const JumpKernelModel& M);

// c_delta(t,x): first moment of jumps |y| <= 1 under the truncated kernel.
// Zero when alpha <= 1; the symmetric direction set makes the small-jump part
// cancel exactly, so only one-sided extensions would produce drift.
Vec compensator(const JumpKernelModel& M, double t, const Vec& x);

// sup over lattice points of |K^delta f - K f| certified against
// delta^{alpha-beta} c2 B_M with c2 a bound on f up to second derivatives
ErrorPair truncation_error(const Field& f, double c2, const JumpKernelModel& M,
                           double delta_cut, double t = 0);

}  // namespace levy
