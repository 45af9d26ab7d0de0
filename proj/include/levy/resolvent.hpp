#pragma once
#include <optional>
#include "levy/density.hpp"

namespace levy {

// Uniform time grid t0 + j dt, j = 0..nt-1, with one lattice field per slice.
// Interpolation is linear in t (multilinear in x comes from the lattice).
// Beyond the last slice the function is either zero (compact support) or
// frozen at the last slice; the mode is part of the object.
enum class TimeExtension { zero, constant };

struct SpaceTimeField {
    double t0 = 0, dt = 0;
    Lattice lat;
    std::vector<Field> slices;
    TimeExtension ext = TimeExtension::zero;

    double t_end() const { return t0 + dt * (slices.empty() ? 0 : slices.size() - 1); }
    double sup_norm() const;  // cached on first call
    int slice_index(double t) const { return static_cast<int>(std::floor((t - t0) / dt)); }

  private:
    mutable std::optional<double> sup_cache_;
};

// nodes/weights for int_0^inf e^{-lam u} P_u . du; weights carry the e^{-lam u}
// factor and are renormalized panel-by-panel so each panel integrates e^{-lam u}
// exactly. Panel edges include every multiple of knot_dt (payload kinks) plus a
// geometric refinement toward zero.
struct QuadratureScheme {
    double lambda = 0;
    double U_max = 0;
    double knot_dt = 0;  // panel edges hit every multiple of this
    std::vector<double> nodes, weights;
    double tail_factor = 0;      // e^{-lam U_max}/lam: certified tail per unit sup norm
    double node_floor_mass = 0;  // exact weight mass below the smallest panel edge
    int n_panels = 0;
};

QuadratureScheme build_scheme(double lambda, double rel_tol, double knot_dt, int gl_order = 6);

// R_lam with per-(scheme, model, lattice) cached spectral tables.
// Evaluation: accumulate w_m e^{-u_m psi(u)} ghat(t+u_m) over nodes, one
// inverse transform per output slice; constant-extension tails are added in
// closed form per mode.
class ResolventOp {
  public:
    ResolventOp(const Model& m, const Lattice& lat, const QuadratureScheme& s);

    Field apply(const SpaceTimeField& g, double t_out, double* tail_bound = nullptr) const;
    SpaceTimeField apply_all(const SpaceTimeField& g) const;
    Field apply_grad(const SpaceTimeField& g, double t_out, int axis) const;

    // real-space kernel of the full operator (nodes + analytic tail) applied
    // to time-frozen payloads; mass is exactly 1/lambda. grad_axis >= 0 gives
    // the gradient kernel instead.
    Field kernel(int grad_axis = -1) const;

    const QuadratureScheme& scheme() const { return scheme_; }
    const Lattice& lattice() const { return lat_; }
    const Model& model() const { return model_; }

  private:
    Model model_;
    Lattice lat_;
    QuadratureScheme scheme_;
    SpectralVec psi_;                      // psi(u_m) over the grid
    std::vector<SpectralVec> node_exp_;    // e^{-u psi(u_m)} per node
    SpectralVec accumulate(const std::vector<SpectralVec>& spectra, const SpaceTimeField& g,
                           double t_out, double* tail_bound) const;
    friend std::vector<SpectralVec> slice_spectra(const SpaceTimeField& g);
};

std::vector<SpectralVec> slice_spectra(const SpaceTimeField& g);

// random band-limited payload generator for probe ensembles (sup-normalized)
SpaceTimeField random_bandlimited(const Lattice& lat, double t0, double dt, int nt, int max_mode,
                                  uint64_t seed, TimeExtension ext = TimeExtension::zero);

// measured Holder quotient of R_lam g over lattice shifts, with the certified
// Gamma-form ceiling computed from c4. The sup over bounded payloads of the
// difference quotient equals the shift-difference L1 norm of the operator
// kernel (attained by a sign payload), so that is what gets measured; a probe
// ensemble additionally exercises the apply path and must never exceed it.
struct HolderResult {
    double measured = 0;       // sup_z ||k(.+z) - k||_1 / |z|^delta (payload worst case)
    double ensemble = 0;       // same quotient over the probe ensemble (<= measured)
    double ceiling = 0;        // c4 Gamma(1-delta/alpha) lam^{delta/alpha-1}
    double grad_measured = 0;  // gradient variant (alpha > 1 only)
    double grad_ceiling = 0;   // c5 Gamma(1-(1+delta)/alpha) lam^{(1+delta)/alpha-1}
};

HolderResult holder_modulus(const ResolventOp& op, double delta, const std::vector<double>& t_list,
                            int n_payloads, uint64_t seed, double c4, double c5 = 0);

// || |del|^delta p1 ||_L1 for a symmetric pure-stable model (the constant in
// the Holder ceiling). Inner part on an internal lattice sized by the model
// scale; tail and periodization images from the closed-form cusp expansion
// sum_k ((-c)^k/k!) Gamma(1+delta+k alpha) sin(pi(delta+k alpha)/2)/pi
// |x|^{-1-delta-k alpha}. `tail` is the declared accuracy allowance.
struct NormWithTail {
    double value = 0;
    double tail = 0;  // declared allowance (series remainder + grid slop)
};
NormWithTail measure_c4(const Model& m, double delta);
NormWithTail measure_c5(const Model& m, double delta);  // gradient variant

// L^r generalization of the same measurements (delta = 0 gives the plain
// density norm); r = 1 routes through the exact signed-tail path above
NormWithTail measure_stable_norm(const Model& m, double delta, double r, bool grad);

/// c6(z) estimates: integral of | |w+z|^{delta-d} - |w|^{delta-d} | / |z|^delta,
// singularity-split quadrature; d in {1,2}
double komatsu_integral(int d, double delta, double z);

// sup over interior nodes of |lam R g - dt R g - L R g - g|
double resolvent_identity_residual(const ResolventOp& op, const SpaceTimeField& g);

}  // namespace levy
