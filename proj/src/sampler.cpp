#include "levy/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levy/mollify.hpp"
#include "levy/rng.hpp"

namespace levy {

namespace {

// columns of the square root of scale * C; zero modes are dropped, so a
// degenerate matrix draws no noise at all in its null directions
std::vector<Vec> cov_columns(const std::vector<std::vector<double>>& C, double scale, int d) {
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = C[i][j];
    double mx = A.cwiseAbs().maxCoeff();
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + mx))
        throw std::domain_error("sampler: covariance matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    std::vector<Vec> cols;
    for (int j = 0; j < d; ++j) {
        double lam = es.eigenvalues()[j];
        if (lam < -1e-10 * (1.0 + mx))
            throw std::domain_error("sampler: covariance matrix must be positive semidefinite");
        if (lam <= 0) continue;
        Vec c(d);
        double sq = std::sqrt(scale * lam);
        for (int i = 0; i < d; ++i) c[i] = sq * es.eigenvectors()(i, j);
        cols.push_back(c);
    }
    return cols;
}

struct RayPlan {
    Vec dir;
    double rate = 0;  // intensity of jumps above eps
};

}  // namespace

PathSample sample_path(const Model& L, const JumpKernelModel* K, double s, const Vec& x, double T,
                       double dt, uint64_t seed, uint64_t stream, const SamplerConfig& cfg) {
    const int d = L.d;
    if (d < 1 || d > 2) throw std::invalid_argument("sampler: dimension must be 1 or 2");
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("sampler: start point has the wrong dimension");
    if (!(dt > 0) || !(T > s)) throw std::invalid_argument("sampler: need T > s and dt > 0");
    if (!(cfg.eps > 0) || cfg.eps > 1.0)
        throw std::domain_error("sampler: ray cutoff eps must lie in (0, 1]");
    const double alpha = L.alpha;
    if (!L.atoms.empty() && !(alpha > 0 && alpha < 2))
        throw std::domain_error("sampler: stable order must lie in (0, 2)");

    // envelope bounds of the fused thinning step for the state kernel
    double env_radial = 0, env_atoms = 0, pow_half = 0;
    if (K) {
        validate_kernel(*K);
        if (beta_moment_bound(*K) > 0) {
            if (K->delta_cut <= 0)
                throw std::domain_error("sampler: state kernel needs an inner cutoff");
            if (K->kappa_sup > 0) {
                pow_half = std::pow(0.5 * K->delta_cut, -K->beta_prime);
                env_radial = K->kappa_sup * sphere_area(d) * (pow_half - 1.0) / K->beta_prime;
            }
            for (const ExtraJump& a : K->big) env_atoms += K->eta_sup * a.rate;
        }
    }
    const double lambda_max = env_radial + env_atoms;
    if (lambda_max * dt >= 0.1)
        throw std::invalid_argument("sampler: thinning bound Lambda_max dt must stay below 0.1");

    // ray plans and the compensation drift: the exponent compensates ray jumps
    // on r <= 1 at every order, so folding the [0, eps) part always removes
    // the compensator mass over [eps, 1] -- the same closed form on both sides
    // of alpha = 1, hitting the log at alpha = 1
    std::vector<RayPlan> rays;
    Vec drift(d, 0.0);
    double mom2 = 0;  // second moment of a unit-weight folded ray, per unit time
    if (!L.atoms.empty()) {
        const double eps = cfg.eps;
        mom2 = std::pow(eps, 2.0 - alpha) / (2.0 - alpha);
        for (const SpectralAtom& at : L.atoms) {
            RayPlan rp;
            rp.dir = at.dir;
            rp.rate = at.w * std::pow(eps, -alpha) / alpha;
            double m1 = (alpha == 1.0) ? std::log(1.0 / eps)
                                       : (1.0 - std::pow(eps, 1.0 - alpha)) / (1.0 - alpha);
            for (int i = 0; i < d; ++i) drift[i] -= at.w * m1 * at.dir[i];
            rays.push_back(rp);
        }
    }

    std::vector<Vec> small_cols;
    if (cfg.small_jump_gaussian && !L.atoms.empty()) {
        std::vector<std::vector<double>> C(d, std::vector<double>(d, 0.0));
        for (const SpectralAtom& at : L.atoms)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) C[i][j] += at.w * mom2 * at.dir[i] * at.dir[j];
        small_cols = cov_columns(C, 1.0, d);
    }

    std::vector<Vec> diff_cols;
    if (!L.a.empty()) {
        if (static_cast<int>(L.a.size()) != d)
            throw std::invalid_argument("sampler: diffusion matrix has the wrong dimension");
        for (const auto& row : L.a)
            if (static_cast<int>(row.size()) != d)
                throw std::invalid_argument("sampler: diffusion matrix has the wrong dimension");
        diff_cols = cov_columns(L.a, 2.0, d);
    }

    if (!L.b.empty()) {
        if (static_cast<int>(L.b.size()) != d)
            throw std::invalid_argument("sampler: drift vector has the wrong dimension");
        for (int i = 0; i < d; ++i) drift[i] += L.b[i];
    }
    for (const ExtraJump& e : L.extra)
        if (norm2(e.y) <= 1.0)
            for (int i = 0; i < d; ++i) drift[i] -= e.rate * e.y[i];
    if (env_radial > 0 && K->alpha > 1) {
        // cutoff compensation; identically zero for the symmetric radial rule,
        // computed once so an asymmetric variant would still be exact
        Vec cd = compensator(*K, s, x);
        for (int i = 0; i < d; ++i) drift[i] -= cd[i];
    }

    const int n_steps = static_cast<int>(std::ceil((T - s) / dt - 1e-9));
    PathSample out;
    out.s = s;
    out.T = T;
    out.dt = dt;
    out.seed = seed;
    out.stream = stream;
    out.times.reserve(n_steps + 1);
    out.states.reserve(n_steps + 1);
    Rng rng(seed, stream);
    Vec X = x;
    out.times.push_back(s);
    out.states.push_back(X);

    for (int k = 0; k < n_steps; ++k) {
        const double t0 = s + k * dt;
        const double t1 = (k + 1 == n_steps) ? T : s + (k + 1) * dt;
        const double h = t1 - t0;
        const double sh = std::sqrt(h);
        const Vec Xp = X;  // modulators are frozen at the step start

        for (const Vec& c : diff_cols) {
            double z = rng.normal();
            for (int i = 0; i < d; ++i) X[i] += sh * c[i] * z;
        }
        for (int i = 0; i < d; ++i) X[i] += drift[i] * h;
        for (const RayPlan& rp : rays) {
            uint64_t nj = rng.poisson(rp.rate * h);
            for (uint64_t j = 0; j < nj; ++j) {
                double r = cfg.eps * std::pow(rng.uniform(), -1.0 / alpha);
                JumpEvent ev;
                ev.time = t1;
                ev.source = JumpSource::stable_ray;
                ev.y = Vec(d, 0.0);
                for (int i = 0; i < d; ++i) {
                    ev.y[i] = r * rp.dir[i];
                    X[i] += ev.y[i];
                }
                out.jumps.push_back(ev);
            }
        }
        for (const Vec& c : small_cols) {
            double z = rng.normal();
            for (int i = 0; i < d; ++i) X[i] += sh * c[i] * z;
        }
        for (const ExtraJump& e : L.extra) {
            uint64_t nj = rng.poisson(e.rate * h);
            for (uint64_t j = 0; j < nj; ++j) {
                JumpEvent ev;
                ev.time = t1;
                ev.source = JumpSource::extra;
                ev.y = e.y;
                for (int i = 0; i < d; ++i) X[i] += e.y[i];
                out.jumps.push_back(ev);
            }
        }
        if (lambda_max > 0) {
            uint64_t nc = rng.poisson(lambda_max * h);
            for (uint64_t j = 0; j < nc; ++j) {
                double pick = rng.uniform() * lambda_max;
                JumpEvent ev;
                ev.time = t1;
                ev.source = JumpSource::state_kernel;
                ev.y = Vec(d, 0.0);
                double accept_p = 0;
                if (pick < env_radial) {
                    double r = std::pow(1.0 + rng.uniform() * (pow_half - 1.0),
                                        -1.0 / K->beta_prime);
                    if (d == 1) {
                        ev.y[0] = rng.uniform() < 0.5 ? r : -r;
                    } else {
                        double ang = 2.0 * M_PI * rng.uniform();
                        ev.y[0] = r * std::cos(ang);
                        ev.y[1] = r * std::sin(ang);
                    }
                    double ratio = K->kappa(t0, Xp) / K->kappa_sup;
                    if (ratio > 1.0 + 1e-9)
                        throw std::runtime_error(
                            "sampler: small-jump modulator exceeds its declared sup");
                    accept_p = ratio * cutoff_chi(r / K->delta_cut);
                } else {
                    double cum = env_radial;
                    for (const ExtraJump& a : K->big) {
                        cum += K->eta_sup * a.rate;
                        if (pick < cum || &a == &K->big.back()) {
                            ev.y = a.y;
                            break;
                        }
                    }
                    double ratio = K->eta(t0, Xp) / K->eta_sup;
                    if (ratio > 1.0 + 1e-9)
                        throw std::runtime_error(
                            "sampler: big-jump modulator exceeds its declared sup");
                    accept_p = ratio;
                }
                if (rng.uniform() < accept_p) {
                    for (int i = 0; i < d; ++i) X[i] += ev.y[i];
                    out.jumps.push_back(ev);
                }
            }
        }
        out.times.push_back(t1);
        out.states.push_back(X);
    }
    return out;
}

PathSample EnsembleSpec::path(uint64_t i) const {
    return sample_path(L, kernel, s, x, T, dt, seed, i, cfg);
}

MCEstimate estimate_V(const EnsembleSpec& ens, const std::function<double(double, const Vec&)>& g,
                      double lambda, double tail_sup) {
    if (!(lambda > 0)) throw std::domain_error("estimate_V: lambda must be positive");
    double mean = 0, m2 = 0;
    for (uint64_t i = 0; i < ens.count; ++i) {
        PathSample p = ens.path(i);
        double v = 0;
        double g0 = g(p.times.front(), p.states.front());
        for (size_t k = 0; k + 1 < p.times.size(); ++k) {
            double g1 = g(p.times[k + 1], p.states[k + 1]);
            double u0 = p.times[k] - ens.s;
            double h = p.times[k + 1] - p.times[k];
            double z = lambda * h;
            double e0 = std::exp(-lambda * u0);
            // exact integrals of e^{-lambda u} times the linear hat weights
            double phi1, j1f;
            if (z > 1e-8) {
                phi1 = -std::expm1(-z) / z;
                j1f = (phi1 - std::exp(-z)) / z;
            } else {
                phi1 = 1.0 - 0.5 * z;
                j1f = 0.5 - z / 3.0;
            }
            double j0 = e0 * h * phi1;
            double j1 = e0 * h * j1f;
            v += (j0 - j1) * g0 + j1 * g1;
            g0 = g1;
        }
        double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    MCEstimate r;
    r.count = ens.count;
    r.mean = mean;
    if (ens.count > 1)
        r.std_error = std::sqrt(m2 / static_cast<double>(ens.count - 1) /
                                static_cast<double>(ens.count));
    r.bias_bound = std::exp(-lambda * (ens.T - ens.s)) * tail_sup / lambda;
    return r;
}

DynkinReport dynkin_residual(const EnsembleSpec& ens, const Field& f, double t1, double t2) {
    auto grid_index = [&](double t) {
        double q = (t - ens.s) / ens.dt;
        long k = std::lround(q);
        if (std::abs(q - static_cast<double>(k)) > 1e-9 || k < 0)
            throw std::invalid_argument("dynkin_residual: window ends must sit on the path grid");
        return k;
    };
    long k1 = grid_index(t1), k2 = grid_index(t2);
    if (k1 >= k2 || t2 > ens.T + 1e-12)
        throw std::invalid_argument("dynkin_residual: need t1 < t2 inside the path window");

    const Lattice& lat = f.lat;
    Field Lf = apply_multiplier(f, generator_table(lat, ens.L));
    std::vector<Field> grads;
    const std::vector<Field>* gp = nullptr;
    bool has_kernel = ens.kernel && beta_moment_bound(*ens.kernel) > 0;
    if (has_kernel && ens.kernel->alpha > 1 && ens.kernel->kappa_sup > 0) {
        for (int a = 0; a < lat.d; ++a)
            grads.push_back(apply_multiplier(f, gradient_table(lat, a)));
        gp = &grads;
    }
    std::vector<Field> Gf;
    Gf.reserve(k2 - k1 + 1);
    for (long k = k1; k <= k2; ++k) {
        Field gk = Lf;
        if (has_kernel) {
            KField kf = apply_K(f, *ens.kernel, ens.s + k * ens.dt, gp);
            for (int64_t m = 0; m < lat.size(); ++m) gk.v[m] += kf.value.v[m];
        }
        Gf.push_back(gk);
    }

    double lhs = 0, rhs = 0, mean = 0, m2 = 0;
    for (uint64_t i = 0; i < ens.count; ++i) {
        PathSample p = ens.path(i);
        double li = interp_cubic(f, p.states[k2].data()) - interp_cubic(f, p.states[k1].data());
        double ri = 0;
        for (long k = k1; k < k2; ++k) {
            double h = p.times[k + 1] - p.times[k];
            ri += 0.5 * h * (interp_cubic(Gf[k - k1], p.states[k].data()) +
                             interp_cubic(Gf[k + 1 - k1], p.states[k + 1].data()));
        }
        lhs += li;
        rhs += ri;
        double di = li - ri;
        double delta = di - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (di - mean);
    }
    DynkinReport r;
    r.lhs = lhs / static_cast<double>(ens.count);
    r.rhs = rhs / static_cast<double>(ens.count);
    r.residual = std::abs(mean);
    if (ens.count > 1)
        r.std_error = std::sqrt(m2 / static_cast<double>(ens.count - 1) /
                                static_cast<double>(ens.count));
    return r;
}

namespace {

// linear-in-time slice interpolation at (t, x), honoring the extension mode
double st_value(const SpaceTimeField& F, double t, const Vec& x) {
    if (F.slices.empty()) return 0.0;
    double q = (t - F.t0) / F.dt;
    int last = static_cast<int>(F.slices.size()) - 1;
    if (q <= 0) return interp_cubic(F.slices.front(), x.data());
    if (q >= last) {
        if (F.ext == TimeExtension::constant) return interp_cubic(F.slices.back(), x.data());
        if (q > last) return 0.0;
        return interp_cubic(F.slices.back(), x.data());
    }
    int j = static_cast<int>(std::floor(q));
    double th = q - j;
    return (1.0 - th) * interp_cubic(F.slices[j], x.data()) +
           th * interp_cubic(F.slices[j + 1], x.data());
}

}  // namespace

NeumannComparison mc_vs_neumann(const EnsembleSpec& ens, const ResolventOp& R,
                                const SpaceTimeField& g_field,
                                const std::function<double(double, const Vec&)>& g,
                                double tail_sup, double k_lam, double systematic) {
    if (!ens.kernel) throw std::invalid_argument("mc_vs_neumann: ensemble must carry the kernel");
    double lambda = R.scheme().lambda;
    NeumannResult nr = neumann_G(R, g_field, *ens.kernel, k_lam, 1e-9);
    double v_series = st_value(nr.G, ens.s, ens.x);
    MCEstimate mc = estimate_V(ens, g, lambda, tail_sup);
    NeumannComparison rec;
    rec.mc_mean = mc.mean;
    rec.mc_std_error = mc.std_error;
    rec.mc_bias_bound = mc.bias_bound;
    rec.neumann = v_series;
    rec.neumann_truncation = nr.truncation_bound;
    rec.systematic = systematic;
    rec.gap = std::abs(mc.mean - v_series);
    rec.allowance = 3.0 * mc.std_error + mc.bias_bound + nr.truncation_bound + systematic;
    rec.pass = rec.gap <= rec.allowance;
    return rec;
}

KrylovMCReport krylov_mc_check(const EnsembleSpec& ens, const std::vector<double>& widths,
                               double p) {
    const int d = ens.L.d;
    const double alpha = ens.L.alpha;
    const double beta = ens.kernel ? ens.kernel->beta : 0.0;
    KrylovMCReport rep;
    rep.p = p;
    rep.admissible_above = (d + alpha) / (alpha - beta);
    if (!(p > rep.admissible_above))
        throw std::invalid_argument("krylov_mc_check: p must exceed (d + alpha)/(alpha - beta)");
    if (widths.empty()) return rep;

    const size_t nw = widths.size();
    std::vector<double> mean(nw, 0.0), m2(nw, 0.0);
    for (uint64_t i = 0; i < ens.count; ++i) {
        PathSample path = ens.path(i);
        for (size_t w = 0; w < nw; ++w) {
            double inv2 = 1.0 / (2.0 * widths[w] * widths[w]);
            auto probe = [&](const Vec& xv) {
                double q = 0;
                for (int a = 0; a < d; ++a) {
                    double dx = xv[a] - ens.x[a];
                    q += dx * dx;
                }
                return std::exp(-q * inv2);
            };
            double v = 0, f0 = probe(path.states.front());
            for (size_t k = 0; k + 1 < path.times.size(); ++k) {
                double f1 = probe(path.states[k + 1]);
                v += 0.5 * (path.times[k + 1] - path.times[k]) * (f0 + f1);
                f0 = f1;
            }
            double delta = v - mean[w];
            mean[w] += delta / static_cast<double>(i + 1);
            m2[w] += delta * (v - mean[w]);
        }
    }
    for (size_t w = 0; w < nw; ++w) {
        double eps = widths[w];
        double lp = std::pow(
            (ens.T - ens.s) * std::pow(eps * std::sqrt(2.0 * M_PI / p), static_cast<double>(d)),
            1.0 / p);
        double se = ens.count > 1 ? std::sqrt(m2[w] / static_cast<double>(ens.count - 1) /
                                              static_cast<double>(ens.count))
                                  : 0.0;
        rep.width.push_back(eps);
        rep.lhs.push_back(mean[w]);
        rep.lhs_se.push_back(se);
        rep.lp_norm.push_back(lp);
        rep.ratio.push_back(mean[w] / lp);
    }
    return rep;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: need at least one sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double dmax = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double F = cdf(samples[i]);
        dmax = std::max(dmax, std::max(F - static_cast<double>(i) / n,
                                       static_cast<double>(i + 1) / n - F));
    }
    return dmax;
}

double ks_tail(double lambda) {
    if (lambda < 0.05) return 1.0;
    double s = 0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
        s += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * s));
}

double ks_pvalue(double d, uint64_t n) {
    double sn = std::sqrt(static_cast<double>(n));
    return ks_tail(d * (sn + 0.12 + 0.11 / sn));
}

}  // namespace levy
