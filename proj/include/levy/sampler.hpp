#pragma once
#include <cstdint>
#include <functional>
#include "levy/perturb.hpp"
#include "levy/rng.hpp"

namespace levy {

enum class JumpSource { stable_ray, extra, state_kernel };

struct JumpEvent {
    double time = 0;  // step boundary at which the jump was applied
    Vec y;
    JumpSource source = JumpSource::stable_ray;
};

struct SamplerConfig {
    // ray jumps below eps are folded into drift plus (optionally) a
    // matched-variance Gaussian; eps in (0, 1]
    double eps = 0.15;
    bool small_jump_gaussian = true;
};

struct PathSample {
    double s = 0, T = 0, dt = 0;
    uint64_t seed = 0, stream = 0;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<JumpEvent> jumps;
};

// One Euler path of the approximating process on the grid s + k dt:
//   Gaussian increment (covariance 2 a dt), drift (b - compensation) dt,
//   compound-Poisson ray jumps above eps, optional small-jump Gaussian,
//   compensated finite-activity atoms, and thinned state-kernel jumps from
//   the envelope kappa_sup |y|^{-d-beta'} chi(|y|/delta) dy + eta_sup atoms.
// The kernel must carry an inner cutoff (delta_cut > 0) unless its mass
// bounds vanish. Throws std::invalid_argument when the thinning step
// probability bound Lambda_max dt would reach 0.1, std::runtime_error when a
// modulator exceeds its declared sup during thinning.
PathSample sample_path(const Model& L, const JumpKernelModel* K, double s, const Vec& x, double T,
                       double dt, uint64_t seed, uint64_t stream = 0,
                       const SamplerConfig& cfg = {});

// Lazy path ensemble: path i is regenerated on demand from (seed, i), so
// estimators stream over arbitrary counts without storing trajectories.
struct EnsembleSpec {
    Model L;
    const JumpKernelModel* kernel = nullptr;
    double s = 0;
    Vec x = {0.0};
    double T = 1.0;
    double dt = 1.0 / 32;
    uint64_t seed = 1;
    uint64_t count = 1000;
    SamplerConfig cfg;

    PathSample path(uint64_t i) const;
};

struct MCEstimate {
    double mean = 0, std_error = 0;
    double bias_bound = 0;  // e^{-lambda (T-s)} tail_sup / lambda
    uint64_t count = 0;
};

// Monte Carlo value of int_s^T e^{-lambda (u-s)} g(u, X_u) du; the exponential
// weight is integrated exactly against the piecewise-linear-in-time payload,
// so constant payloads come out with zero variance. tail_sup bounds |g| on
// [T, infinity) and prices the discarded horizon tail.
MCEstimate estimate_V(const EnsembleSpec& ens, const std::function<double(double, const Vec&)>& g,
                      double lambda, double tail_sup = 0.0);

struct DynkinReport {
    double lhs = 0;       // mean of f(X_{t2}) - f(X_{t1})
    double rhs = 0;       // mean of int_{t1}^{t2} (L + K) f(X_u) du
    double residual = 0;  // |lhs - rhs|
    double std_error = 0;  // standard error of the per-path difference
};

// Conservation-form check of the generator along sampled paths; f is a lattice
// field (periodic), t1 and t2 must sit on the path grid.
DynkinReport dynkin_residual(const EnsembleSpec& ens, const Field& f, double t1, double t2);

struct NeumannComparison {
    double mc_mean = 0, mc_std_error = 0, mc_bias_bound = 0;
    double neumann = 0;             // series value at (s, x)
    double neumann_truncation = 0;  // certified series tail
    double systematic = 0;          // declared discretization allowance
    double gap = 0;                 // |mc_mean - neumann|
    double allowance = 0;           // 3 se + bias + truncation + systematic
    bool pass = false;
};

// Same functional both ways: Monte Carlo over the sampled process against the
// perturbed-resolvent series, with the gap judged against its full error
// budget. g_field and g must describe the same payload on ens's grid.
NeumannComparison mc_vs_neumann(const EnsembleSpec& ens, const ResolventOp& R,
                                const SpaceTimeField& g_field,
                                const std::function<double(double, const Vec&)>& g,
                                double tail_sup, double k_lam, double systematic);

struct KrylovMCReport {
    double p = 0;
    double admissible_above = 0;  // (d + alpha) / (alpha - beta)
    std::vector<double> width, lhs, lhs_se, lp_norm, ratio;
};

// Occupation functionals of Gaussian probes f_eps(x) = exp(-|x - x0|^2 /
// (2 eps^2)) against their space-time L^p norms; the ratio must stay bounded
// as eps shrinks when p is admissible. Inadmissible p throws
// std::invalid_argument.
KrylovMCReport krylov_mc_check(const EnsembleSpec& ens, const std::vector<double>& widths,
                               double p);

// Kolmogorov-Smirnov machinery for marginal-law tests
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_tail(double lambda);             // Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}
double ks_pvalue(double d, uint64_t n);    // finite-n corrected tail probability

}  // namespace levy
