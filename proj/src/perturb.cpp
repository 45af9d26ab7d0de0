#include "levy/perturb.hpp"
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace levy {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::measured: return "measured";
        case Provenance::gamma_ceiling: return "gamma-ceiling";
        case Provenance::derived_formula: return "derived-formula";
    }
    return "?";
}

namespace {

bool key_eq(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool val_eq(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

void ConstantsLedger::put(const LedgerEntry& e) {
    const LedgerEntry* old = find(e.name, e.alpha, e.delta, e.r, e.lambda, e.r2, &e.prov);
    if (old) {
        if (!val_eq(old->value, e.value) || !val_eq(old->allowance, e.allowance))
            throw std::logic_error("ledger: '" + e.name +
                                   "' already recorded with a different value (append-only)");
        return;
    }
    rows_.push_back(e);
}

const LedgerEntry* ConstantsLedger::find(const std::string& name, double alpha, double delta,
                                         double r, double lambda, double r2,
                                         const Provenance* prov) const {
    for (const LedgerEntry& e : rows_) {
        if (e.name != name) continue;
        if (!key_eq(e.alpha, alpha) || !key_eq(e.delta, delta) || !key_eq(e.r, r) ||
            !key_eq(e.lambda, lambda) || !key_eq(e.r2, r2))
            continue;
        if (prov && e.prov != *prov) continue;
        return &e;
    }
    return nullptr;
}

double ConstantsLedger::value(const std::string& name, double alpha, double delta, double r,
                              double lambda, double r2, const Provenance* prov) const {
    const LedgerEntry* e = find(name, alpha, delta, r, lambda, r2, prov);
    if (!e) throw std::out_of_range("ledger: missing entry '" + name + "'");
    return e->value;
}

double delta_policy(double alpha, double beta) {
    if (!(beta > 0 && beta < alpha))
        throw std::domain_error("delta_policy: need 0 < beta < alpha");
    if (alpha <= 1.0) return beta;
    double lo = std::max(0.0, beta - 1.0), hi = alpha - 1.0;
    double bal = 0.5 * (beta + alpha - 1.0);
    return (bal > lo && bal < hi) ? bal : 0.5 * (lo + hi);
}

double gamma_C(double c4, double alpha, double delta, double lambda) {
    if (!(delta > 0 && delta < alpha))
        throw std::domain_error("gamma_C: need 0 < delta < alpha");
    if (lambda <= 0) throw std::domain_error("gamma_C: lambda must be positive");
    return c4 * std::tgamma(1.0 - delta / alpha) * std::pow(lambda, delta / alpha - 1.0);
}

double gamma_C_grad(double c5, double alpha, double delta, double lambda) {
    if (!(delta > 0 && 1.0 + delta < alpha))
        throw std::domain_error("gamma_C_grad: need 0 < delta and 1 + delta < alpha");
    if (lambda <= 0) throw std::domain_error("gamma_C_grad: lambda must be positive");
    return c5 * std::tgamma(1.0 - (1.0 + delta) / alpha) *
           std::pow(lambda, (1.0 + delta) / alpha - 1.0);
}

void record_norm(ConstantsLedger& led, const std::string& name, double alpha, double delta,
                 double r, const NormWithTail& n) {
    led.put({name, alpha, delta, r, 0, 0, n.value, n.tail, Provenance::measured});
}

void record_modulus(ConstantsLedger& led, double alpha, double delta, double lambda,
                    const HolderResult& h) {
    led.put({"C_lambda", alpha, delta, 0, lambda, 0, h.measured, 0, Provenance::measured});
    led.put({"C_lambda", alpha, delta, 0, lambda, 0, h.ceiling, 0, Provenance::gamma_ceiling});
    if (h.grad_ceiling > 0) {
        led.put({"C_hat_lambda", alpha, delta, 0, lambda, 0, h.grad_measured, 0,
                 Provenance::measured});
        led.put({"C_hat_lambda", alpha, delta, 0, lambda, 0, h.grad_ceiling, 0,
                 Provenance::gamma_ceiling});
    }
}

void record_gamma_modulus(ConstantsLedger& led, double alpha, double delta, double lambda) {
    if (alpha > 1.0) {
        const LedgerEntry* c5 = led.find("c5", alpha, delta, 1.0);
        if (!c5) throw std::out_of_range("ledger: missing c5 at r = 1 for the gradient ceiling");
        led.put({"C_hat_lambda", alpha, delta, 0, lambda, 0,
                 gamma_C_grad(c5->value, alpha, delta, lambda),
                 gamma_C_grad(c5->allowance, alpha, delta, lambda), Provenance::gamma_ceiling});
    } else {
        const LedgerEntry* c4 = led.find("c4", alpha, delta, 1.0);
        if (!c4) throw std::out_of_range("ledger: missing c4 at r = 1 for the ceiling");
        led.put({"C_lambda", alpha, delta, 0, lambda, 0,
                 gamma_C(c4->value, alpha, delta, lambda),
                 gamma_C(c4->allowance, alpha, delta, lambda), Provenance::gamma_ceiling});
    }
}

void record_kernel_bound(ConstantsLedger& led, const JumpKernelModel& M) {
    led.put({"B_M", M.alpha, 0, 0, 0, 0, beta_moment_bound(M), 0, Provenance::derived_formula});
}

double k_lambda(const JumpKernelModel& M, double lambda, double delta, ConstantsLedger& led,
                Provenance which) {
    if (lambda <= 0) throw std::domain_error("k_lambda: lambda must be positive");
    double bm = beta_moment_bound(M);
    if (bm == 0.0) return 0.0;
    const char* name = M.alpha > 1.0 ? "C_hat_lambda" : "C_lambda";
    const LedgerEntry* C = led.find(name, M.alpha, delta, 0, lambda, 0, &which);
    if (!C)
        throw std::out_of_range(std::string("k_lambda: ledger lacks ") + name +
                                " at the requested key");
    double k = (C->value + 2.0 / lambda) * bm;
    led.put({"k_lambda", M.alpha, delta, 0, lambda, 0, k, C->allowance * bm,
             Provenance::derived_formula});
    return k;
}

double find_lambda0(const JumpKernelModel& M, double delta, const std::vector<double>& grid,
                    const std::function<double(double)>& modulus) {
    if (grid.empty()) throw std::invalid_argument("find_lambda0: empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("find_lambda0: grid must increase strictly");
    if (!(delta > 0 && delta < 1))
        throw std::domain_error("find_lambda0: contraction exponent must lie in (0, 1)");
    double bm = beta_moment_bound(M);
    if (bm == 0.0) return grid.front();

    auto k_of = [&](double l) { return (modulus(l) + 2.0 / l) * bm; };
    double prev = std::numeric_limits<double>::infinity();
    int hit = -1;
    for (size_t i = 0; i < grid.size(); ++i) {
        double k = k_of(grid[i]);
        if (k > prev + 1e-12)
            throw std::logic_error("find_lambda0: k_lambda fails to decrease along the grid");
        prev = k;
        if (k < 0.5) {
            hit = static_cast<int>(i);
            break;
        }
    }
    if (hit < 0)
        throw std::runtime_error("find_lambda0: no grid point contracts; enlarge the lambda range");
    if (hit == 0) return grid.front();

    double lo = grid[hit - 1], hi = grid[hit];
    while (hi - lo > 1e-3) {
        double mid = 0.5 * (lo + hi);
        (k_of(mid) < 0.5 ? hi : lo) = mid;
    }
    return hi;  // the certified side
}

KField apply_KR(const ResolventOp& R, const SpaceTimeField& g, const JumpKernelModel& M, double t,
                double tol, int n_dir, double lambda0_hint) {
    if (lambda0_hint > 0 && R.scheme().lambda < lambda0_hint)
        std::cerr << "[apply_KR] warning: lambda " << R.scheme().lambda
                  << " sits below the contraction threshold " << lambda0_hint << "\n";
    Field rg = R.apply(g, t);
    if (M.alpha > 1.0 && M.kappa_sup > 0) {
        std::vector<Field> grads;
        for (int a = 0; a < M.d; ++a) grads.push_back(R.apply_grad(g, t, a));
        return apply_K(rg, M, t, &grads, tol, n_dir);
    }
    return apply_K(rg, M, t, nullptr, tol, n_dir);
}

NeumannResult neumann_G(const ResolventOp& R, const SpaceTimeField& g, const JumpKernelModel& M,
                        double k_lam, double tol, int n_dir) {
    if (tol <= 0) throw std::domain_error("neumann_G: tol must be positive");
    double bm = beta_moment_bound(M);
    if (bm > 0 && !(k_lam >= 0 && k_lam < 0.5))
        throw std::domain_error("neumann_G: series needs k_lambda < 1/2");
    double lambda = R.scheme().lambda;
    double gn = g.sup_norm();

    NeumannResult out;
    out.k_lam = k_lam;

    SpaceTimeField term = R.apply_all(g);
    out.G = term;  // copy before the norm call so no stale cache rides along
    out.term_norms.push_back(term.sup_norm());
    out.iterate_norms.push_back(gn);
    if (bm == 0.0 || gn == 0.0) return out;

    // retained terms: smallest K with lam^{-1} k^{K+1} (1-k)^{-1} ||g|| < tol
    int K = 0;
    double tail = k_lam / (lambda * (1.0 - k_lam)) * gn;
    while (tail >= tol) {
        tail *= k_lam;
        if (++K > 400) throw std::runtime_error("neumann_G: contraction too weak for this tol");
    }

    bool comp = M.alpha > 1.0 && M.kappa_sup > 0;
    double tol_K = std::max(1e-13, 1e-10 * gn);
    for (int i = 1; i <= K; ++i) {
        SpaceTimeField h;
        h.t0 = g.t0;
        h.dt = g.dt;
        h.lat = g.lat;
        h.ext = g.ext;
        for (size_t j = 0; j < term.slices.size(); ++j) {
            double tj = g.t0 + g.dt * j;
            KField kf;
            if (comp) {
                std::vector<Field> grads;
                for (int a = 0; a < M.d; ++a)
                    grads.push_back(apply_multiplier(term.slices[j], gradient_table(g.lat, a)));
                kf = apply_K(term.slices[j], M, tj, &grads, tol_K, n_dir);
            } else {
                kf = apply_K(term.slices[j], M, tj, nullptr, tol_K, n_dir);
            }
            h.slices.push_back(std::move(kf.value));
        }
        double hn = h.sup_norm();
        out.iterate_norms.push_back(hn);
        if (hn <= 1e-14 * gn) {
            out.truncation_bound = hn / (lambda * (1.0 - k_lam));
            return out;  // the series terminated on its own
        }
        term = R.apply_all(h);
        out.term_norms.push_back(term.sup_norm());
        for (size_t j = 0; j < term.slices.size(); ++j)
            for (int64_t k = 0; k < g.lat.size(); ++k) out.G.slices[j].v[k] += term.slices[j].v[k];
    }
    out.truncation_bound = std::pow(k_lam, K + 1) / (lambda * (1.0 - k_lam)) * gn;
    return out;
}

double perturbed_identity_residual(const ResolventOp& R, const SpaceTimeField& G,
                                   const SpaceTimeField& g, const JumpKernelModel& M) {
    if (G.slices.size() != g.slices.size() || !(G.lat == g.lat))
        throw std::invalid_argument("perturbed_identity_residual: field grids must match");
    const Lattice& lat = R.lattice();
    SpectralVec L = generator_table(lat, R.model());
    double lam = R.scheme().lambda;
    bool comp = M.alpha > 1.0 && M.kappa_sup > 0;
    double res = 0;
    int nt = static_cast<int>(G.slices.size());
    for (int j = 1; j + 1 < nt; ++j) {
        Field LG = apply_multiplier(G.slices[j], L);
        double tj = G.t0 + G.dt * j;
        KField kg;
        if (comp) {
            std::vector<Field> grads;
            for (int a = 0; a < M.d; ++a)
                grads.push_back(apply_multiplier(G.slices[j], gradient_table(lat, a)));
            kg = apply_K(G.slices[j], M, tj, &grads);
        } else {
            kg = apply_K(G.slices[j], M, tj);
        }
        for (int64_t k = 0; k < lat.size(); ++k) {
            double dtG = (G.slices[j + 1].v[k] - G.slices[j - 1].v[k]) / (2.0 * G.dt);
            double rr = lam * G.slices[j].v[k] - dtG - LG.v[k] - kg.value.v[k] - g.slices[j].v[k];
            res = std::max(res, std::abs(rr));
        }
    }
    return res;
}

namespace {

// (Gamma(1+s) (q* lam)^{-1-s})^{1/q*}: the exponential-decay time integral in
// the mixed-norm bounds, with s the scaling exponent of the spatial factor
double time_factor(double s, double qs, double lambda) {
    return std::pow(std::tgamma(1.0 + s) * std::pow(qs * lambda, -1.0 - s), 1.0 / qs);
}

}  // namespace

double krylov_constant(int d, double lambda, double p, double q, double alpha, double beta,
                       ConstantsLedger& led, KrylovParts* parts) {
    if (d < 1 || lambda <= 0 || !(p > 1) || !(q > 1) || !(alpha > 0 && alpha < 2) ||
        !(beta > 0 && beta < alpha))
        throw std::invalid_argument("krylov_constant: malformed inputs");
    if (!(d / p + alpha / q < alpha - beta))
        throw std::invalid_argument("krylov_constant: inadmissible (p, q): need d/p + alpha/q < alpha - beta");

    double delta = delta_policy(alpha, beta);
    double ps = p / (p - 1.0), qs = q / (q - 1.0);
    bool grad_route = alpha > 1.0;
    if (grad_route && !(d / p + alpha / q < alpha - 1.0 - delta))
        throw std::domain_error(
            "krylov_constant: the gradient-route time integral diverges: need d/p + alpha/q < "
            "alpha - 1 - delta");

    double c2 = led.value("c2", alpha, 0, ps);
    double cf = led.value(grad_route ? "c5" : "c4", alpha, delta, ps);
    double bm = led.value("B_M", alpha);

    double s_c = -qs * d / (p * alpha);
    double c_lam = c2 * time_factor(s_c, qs, lambda);
    double s_n = qs * (d / ps - delta - (grad_route ? 1.0 : 0.0) - d) / alpha;
    double n_lam = cf * time_factor(s_n, qs, lambda);
    double c_tilde = (n_lam + 2.0 * c_lam) * bm;
    double l_lam = c_lam * (1.0 + 2.0 * c_tilde);

    led.put({"c_lambda", alpha, 0, p, lambda, q, c_lam, 0, Provenance::derived_formula});
    led.put({"n_lambda", alpha, delta, p, lambda, q, n_lam, 0, Provenance::derived_formula});
    led.put({"c_tilde_lambda", alpha, delta, p, lambda, q, c_tilde, 0,
             Provenance::derived_formula});
    led.put({"l_lambda", alpha, delta, p, lambda, q, l_lam, 0, Provenance::derived_formula});

    if (parts) {
        parts->delta = delta;
        parts->c_lam = c_lam;
        parts->n_lam = n_lam;
        parts->c_tilde = c_tilde;
        parts->l_lam = l_lam;
        parts->grad_route = grad_route;
    }
    return l_lam;
}

}  // namespace levy
