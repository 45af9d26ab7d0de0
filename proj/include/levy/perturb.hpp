#pragma once
#include <string>
#include "levy/jump_kernel.hpp"
#include "levy/resolvent.hpp"

namespace levy {

enum class Provenance { measured, gamma_ceiling, derived_formula };
const char* provenance_name(Provenance p);

// One named constant with its parameter key, declared allowance, and origin.
// r is a space integrability exponent, r2 a time exponent; unused key slots
// stay at zero.
struct LedgerEntry {
    std::string name;
    double alpha = 0, delta = 0, r = 0, lambda = 0, r2 = 0;
    double value = 0;
    double allowance = 0;
    Provenance prov = Provenance::measured;
};

// Append-only store. Re-inserting an identical entry is a no-op; changing a
// recorded value throws. Lookups may filter by provenance.
class ConstantsLedger {
  public:
    void put(const LedgerEntry& e);
    const LedgerEntry* find(const std::string& name, double alpha = 0, double delta = 0,
                            double r = 0, double lambda = 0, double r2 = 0,
                            const Provenance* prov = nullptr) const;
    // throws std::out_of_range when the entry is absent
    double value(const std::string& name, double alpha = 0, double delta = 0, double r = 0,
                 double lambda = 0, double r2 = 0, const Provenance* prov = nullptr) const;
    const std::vector<LedgerEntry>& rows() const { return rows_; }

  private:
    std::vector<LedgerEntry> rows_;
};

// Holder exponent used inside the contraction constant: beta for alpha <= 1;
// for alpha > 1 the balanced point (beta+alpha-1)/2 when it lies inside the
// admissible window (max(0,beta-1), alpha-1), otherwise the window midpoint.
double delta_policy(double alpha, double beta);

// Gamma closed forms of the resolvent Holder ceilings
// c4 Gamma(1-delta/alpha) lambda^{delta/alpha-1}
double gamma_C(double c4, double alpha, double delta, double lambda);
// c5 Gamma(1-(1+delta)/alpha) lambda^{(1+delta)/alpha-1}   (needs 1+delta < alpha)
double gamma_C_grad(double c5, double alpha, double delta, double lambda);

// measured-norm and Holder-measurement recorders ("c2"/"c4"/"c5"; "C_lambda" /
// "C_hat_lambda" as measured value + gamma ceiling)
void record_norm(ConstantsLedger& led, const std::string& name, double alpha, double delta,
                 double r, const NormWithTail& n);
void record_modulus(ConstantsLedger& led, double alpha, double delta, double lambda,
                    const HolderResult& h);

// gamma-ceiling modulus entry at lambda derived from the recorded "c4" (or
// "c5" when alpha > 1) at r = 1; allowance propagates linearly
void record_gamma_modulus(ConstantsLedger& led, double alpha, double delta, double lambda);

// "B_M" keyed by alpha
void record_kernel_bound(ConstantsLedger& led, const JumpKernelModel& M);

// k = (C_lambda + 2/lambda) B_M with C_lambda ("C_hat_lambda" when alpha > 1)
// taken from the ledger at the requested provenance; records the derived entry.
// B_M = 0 short-circuits to 0.
double k_lambda(const JumpKernelModel& M, double lambda, double delta, ConstantsLedger& led,
                Provenance which = Provenance::gamma_ceiling);

// Smallest lambda with k < 1/2: first admissible grid point, refined by
// bisection to width 1e-3. modulus(lambda) supplies the Holder constant used in
// k. k must be non-increasing along the grid (asserted); throws when the grid
// is exhausted without reaching 1/2.
double find_lambda0(const JumpKernelModel& M, double delta, const std::vector<double>& grid,
                    const std::function<double(double)>& modulus);

// K applied to the resolvent of g at output time t (gradient slices supplied
// to K when alpha > 1). Warns when lambda0_hint > 0 exceeds the scheme lambda.
KField apply_KR(const ResolventOp& R, const SpaceTimeField& g, const JumpKernelModel& M,
                double t, double tol = 1e-8, int n_dir = 16, double lambda0_hint = 0);

struct NeumannResult {
    SpaceTimeField G;
    std::vector<double> term_norms;     // ||R h_i|| for each retained series term
    std::vector<double> iterate_norms;  // ||h_i||, h_0 = g, h_{i+1} = K R h_i
    double k_lam = 0;
    double truncation_bound = 0;  // certified sup bound on the dropped tail
};

// G = sum_i R h_i truncated once the certified tail drops below tol; requires
// k_lam < 1/2. The iterates live on g's time grid with the extension inherited.
NeumannResult neumann_G(const ResolventOp& R, const SpaceTimeField& g, const JumpKernelModel& M,
                        double k_lam, double tol = 1e-6, int n_dir = 16);

struct KrylovParts {
    double delta = 0;
    double c_lam = 0;   // sup <- L^q([0,inf); L^p) bound of R_lambda
    double n_lam = 0;   // fractional-norm route constant (gradient variant when alpha > 1)
    double c_tilde = 0; // (n_lam + 2 c_lam) B_M
    double l_lam = 0;   // c_lam (1 + 2 c_tilde)
    bool grad_route = false;
};

// l_lambda assembled from ledger constants "c2", "c4"/"c5" at r = conjugate of
// p, and "B_M". Gate: d/p + alpha/q < alpha - beta (inadmissible (p,q) throws
// std::invalid_argument). For alpha > 1 the route constant is finite only when
// d/p + alpha/q < alpha - 1 - delta; otherwise throws std::domain_error naming
// the violated inequality. Records the derived entry.
double krylov_constant(int d, double lambda, double p, double q, double alpha, double beta,
                       ConstantsLedger& led, KrylovParts* parts = nullptr);

// sup over interior nodes of |lam G - dt G - L G - K G - g| on G's grid
double perturbed_identity_residual(const ResolventOp& R, const SpaceTimeField& G,
                                   const SpaceTimeField& g, const JumpKernelModel& M);

}  // namespace levy
