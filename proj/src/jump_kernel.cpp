#include "levy/jump_kernel.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include "levy/quadrature.hpp"

namespace levy {

void validate_kernel(const JumpKernelModel& M) {
    if (M.d < 1) throw std::domain_error("jump kernel: dimension must be positive");
    if (!(M.alpha > 0 && M.alpha < 2))
        throw std::domain_error("jump kernel: alpha must lie in (0, 2)");
    if (!(M.beta_prime > 0 && M.beta_prime < M.beta && M.beta < M.alpha))
        throw std::domain_error("jump kernel: need 0 < beta' < beta < alpha");
    if (M.kappa_sup < 0 || M.eta_sup < 0)
        throw std::domain_error("jump kernel: declared sups must be nonnegative");
    if (M.kappa_sup > 0 && !M.kappa)
        throw std::domain_error("jump kernel: declared small-jump mass without a modulator");
    if (M.eta_sup > 0 && !M.big.empty() && !M.eta)
        throw std::domain_error("jump kernel: declared atomic mass without a modulator");
    for (const ExtraJump& j : M.big) {
        if (j.rate < 0) throw std::domain_error("jump kernel: atom rates must be nonnegative");
        if (static_cast<int>(j.y.size()) != M.d)
            throw std::domain_error("jump kernel: atom dimension mismatch");
        if (norm2(j.y) < 1.0)
            throw std::domain_error("jump kernel: atoms must sit on |y| >= 1");
    }
    if (M.delta_cut < 0 || M.delta_cut >= 1)
        throw std::domain_error("jump kernel: delta_cut must lie in [0, 1)");
}

double cutoff_chi(double s) {
    if (s <= 0.5) return 0.0;
    if (s >= 1.0) return 1.0;
    double v = 2.0 * s - 1.0;  // ramp coordinate in (0, 1)
    double a = std::exp(-1.0 / v);
    double b = std::exp(-1.0 / (1.0 - v));
    return a / (a + b);
}

double sphere_area(int d) {
    if (d < 1) throw std::domain_error("sphere_area: dimension must be positive");
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double beta_moment_bound(const JumpKernelModel& M) {
    validate_kernel(M);
    double atoms = 0;
    for (const ExtraJump& j : M.big) atoms += j.rate;  // 1 ^ |y|^beta = 1 out there
    return M.kappa_sup * sphere_area(M.d) / (M.beta - M.beta_prime) + M.eta_sup * atoms;
}

namespace {

// One off-lattice displacement applied to every node at once. The fractional
// cell offset is shared by all nodes, so the Catmull-Rom taps reduce to a
// fixed-shift gather; the polynomial form matches interp_cubic exactly, which
// keeps constants (and linear data away from the seam) cancelling in floating
// point.
struct Disp {
    int off[2] = {0, 0};   // first-tap shift per axis, in [0, n)
    double t[2] = {0, 0};  // fractional offsets
    double w = 0;          // quadrature weight (radial factor folded in)
    double comp[2] = {0, 0};  // compensator rho * theta_a (zero when absent)
};

inline double cr(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 +
                           t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

Disp make_disp(const Lattice& lat, const double* dx, double w) {
    Disp d;
    d.w = w;
    for (int a = 0; a < lat.d; ++a) {
        double rel = dx[a] / lat.h(a);
        double fl = std::floor(rel);
        d.t[a] = rel - fl;
        long s = static_cast<long>(fl) - 1;  // first tap sits one cell below
        int n = lat.n[a];
        s %= n;
        if (s < 0) s += n;
        d.off[a] = static_cast<int>(s);
    }
    return d;
}

void accumulate_1d(const Field& f, const std::vector<Disp>& list, const Field* gx,
                   std::vector<double>& acc) {
    int n = f.lat.n[0];
    const double* v = f.v.data();
    for (const Disp& d : list) {
        double t = d.t[0], w = d.w, cmp = d.comp[0];
        int j0 = d.off[0];
        int j1 = j0 + 1 >= n ? j0 + 1 - n : j0 + 1;
        int j2 = j1 + 1 >= n ? j1 + 1 - n : j1 + 1;
        int j3 = j2 + 1 >= n ? j2 + 1 - n : j2 + 1;
        for (int k = 0; k < n; ++k) {
            double dif = cr(v[j0], v[j1], v[j2], v[j3], t) - v[k];
            if (cmp != 0.0) dif -= cmp * gx->v[k];
            acc[k] += w * dif;
            if (++j0 == n) j0 = 0;
            if (++j1 == n) j1 = 0;
            if (++j2 == n) j2 = 0;
            if (++j3 == n) j3 = 0;
        }
    }
}

void accumulate_2d(const Field& f, const std::vector<Disp>& list, const Field* g1,
                   const Field* g2, std::vector<double>& acc) {
    int n1 = f.lat.n[0], n2 = f.lat.n[1];
    const double* v = f.v.data();
    for (const Disp& d : list) {
        double t1 = d.t[0], t2 = d.t[1], w = d.w;
        double c1 = d.comp[0], c2 = d.comp[1];
        bool cmp = c1 != 0.0 || c2 != 0.0;
        for (int k1 = 0; k1 < n1; ++k1) {
            const double* row[4];
            for (int m = 0; m < 4; ++m) {
                int r = k1 + d.off[0] + m;
                while (r >= n1) r -= n1;
                row[m] = v + static_cast<int64_t>(r) * n2;
            }
            int64_t base = static_cast<int64_t>(k1) * n2;
            int c0 = d.off[1];
            int cA = c0 + 1 >= n2 ? c0 + 1 - n2 : c0 + 1;
            int cB = cA + 1 >= n2 ? cA + 1 - n2 : cA + 1;
            int cC = cB + 1 >= n2 ? cB + 1 - n2 : cB + 1;
            for (int k2 = 0; k2 < n2; ++k2) {
                double q[4];
                for (int m = 0; m < 4; ++m)
                    q[m] = cr(row[m][c0], row[m][cA], row[m][cB], row[m][cC], t2);
                double dif = cr(q[0], q[1], q[2], q[3], t1) - v[base + k2];
                if (cmp) dif -= c1 * g1->v[base + k2] + c2 * g2->v[base + k2];
                acc[base + k2] += w * dif;
                if (++c0 == n2) c0 = 0;
                if (++cA == n2) cA = 0;
                if (++cB == n2) cB = 0;
                if (++cC == n2) cC = 0;
            }
        }
    }
}

void accumulate(const Field& f, const std::vector<Disp>& list, const std::vector<Field>* grad,
                std::vector<double>& acc) {
    const Field* g1 = grad && !grad->empty() ? &(*grad)[0] : nullptr;
    const Field* g2 = grad && grad->size() > 1 ? &(*grad)[1] : nullptr;
    if (f.lat.d == 1)
        accumulate_1d(f, list, g1, acc);
    else
        accumulate_2d(f, list, g1, g2, acc);
}

}  // namespace

KField apply_K(const Field& f, const JumpKernelModel& M, double t,
               const std::vector<Field>* grad, double tol, int n_dir) {
    validate_kernel(M);
    if (M.d > 2) throw std::domain_error("apply_K: implemented for d in {1, 2}");
    const Lattice& lat = f.lat;
    if (lat.d != M.d) throw std::invalid_argument("apply_K: lattice dimension mismatch");
    if (tol <= 0) throw std::domain_error("apply_K: tol must be positive");
    bool comp = M.alpha > 1.0;
    if (comp && M.kappa_sup > 0 && (!grad || static_cast<int>(grad->size()) != M.d))
        throw std::domain_error("apply_K: alpha > 1 needs one gradient field per axis");

    KField out;
    out.value = Field(lat);
    out.rho_min = 1.0;
    int64_t sz = lat.size();

    if (M.kappa_sup > 0) {
        double rho_min = 1.0, rem = 0.0;
        if (M.delta_cut > 0) {
            // the cutoff removes everything below delta/2: exact lower limit
            rho_min = 0.5 * M.delta_cut;
        } else {
            // certificate for the discarded shell: spectral l1 bounds on the
            // first (or, compensated, second) directional derivative of the
            // trig-poly extension of f
            SpectralVec F = analyze(f);
            double scale = 1.0;
            for (int a = 0; a < lat.d; ++a) scale *= lat.du(a) / (2.0 * M_PI);
            double gsum = 0;
            std::vector<int> idx(lat.d);
            Vec u(lat.d);
            for (int64_t m = 0; m < sz; ++m) {
                lat.unflatten(m, idx.data());
                lat.freq_of(idx.data(), u.data());
                double au = norm2(u);
                gsum += (comp ? au * au : au) * std::abs(F[m]);
            }
            double e = (comp ? 2.0 : 1.0) - M.beta_prime;
            double A = M.kappa_sup * sphere_area(M.d) * scale * gsum * (comp ? 0.5 : 1.0);
            if (A > 0) {
                rho_min = std::clamp(std::pow(0.9 * tol * e / A, 1.0 / e), 1e-18, 1.0);
                rem = A * std::pow(rho_min, e) / e;
                if (rem > tol)
                    throw std::runtime_error("apply_K: inner shell cannot be certified at this tol");
            }
        }
        out.rho_min = rho_min;
        out.remainder = rem;

        if (rho_min < 1.0) {
            // antipodal direction set (odd parts cancel pairwise) with the
            // sphere measure; radius gets octave panels from rho_min to 1,
            // with the cutoff ramp [delta/2, delta] split four ways
            std::vector<std::pair<Vec, double>> dirs;
            if (M.d == 1) {
                dirs = {{{1.0}, 1.0}, {{-1.0}, 1.0}};
            } else {
                int nd = std::max(2, n_dir + (n_dir & 1));
                for (int i = 0; i < nd; ++i) {
                    double th = 2.0 * M_PI * (i + 0.5) / nd;
                    dirs.push_back({{std::cos(th), std::sin(th)}, 2.0 * M_PI / nd});
                }
            }
            std::vector<double> edges{rho_min};
            if (M.delta_cut > 0 && M.delta_cut < 1.0)
                for (int i = 1; i <= 4; ++i)
                    edges.push_back(rho_min + (M.delta_cut - rho_min) * i / 4.0);
            while (edges.back() < 1.0) edges.push_back(std::min(2.0 * edges.back(), 1.0));
            const GaussRule& gr = gauss_legendre(8);
            std::vector<Disp> list;
            for (size_t p = 0; p + 1 < edges.size(); ++p) {
                double a = edges[p], b = edges[p + 1];
                for (int i = 0; i < static_cast<int>(gr.x.size()); ++i) {
                    double rho = 0.5 * (a + b) + 0.5 * (b - a) * gr.x[i];
                    double wr = 0.5 * (b - a) * gr.w[i] * std::pow(rho, -1.0 - M.beta_prime);
                    if (M.delta_cut > 0) wr *= cutoff_chi(rho / M.delta_cut);
                    for (const auto& dir : dirs) {
                        double dx[2] = {0, 0};
                        for (int ax = 0; ax < M.d; ++ax) dx[ax] = rho * dir.first[ax];
                        Disp dsp = make_disp(lat, dx, wr * dir.second);
                        if (comp)
                            for (int ax = 0; ax < M.d; ++ax) dsp.comp[ax] = rho * dir.first[ax];
                        list.push_back(dsp);
                    }
                }
            }
            std::vector<double> acc(sz, 0.0);
            accumulate(f, list, comp ? grad : nullptr, acc);

            std::vector<int> kidx(lat.d);
            Vec x(lat.d);
            for (int64_t k = 0; k < sz; ++k) {
                lat.unflatten(k, kidx.data());
                lat.point_of(kidx.data(), x.data());
                out.value.v[k] += M.kappa(t, x) * acc[k];
            }
        }
    }

    if (M.eta_sup > 0 && !M.big.empty()) {
        std::vector<Disp> list;
        for (const ExtraJump& j : M.big) {
            double dx[2] = {0, 0};
            for (int ax = 0; ax < M.d; ++ax) dx[ax] = j.y[ax];
            list.push_back(make_disp(lat, dx, j.rate));
        }
        std::vector<double> acc(sz, 0.0);
        accumulate(f, list, nullptr, acc);
        std::vector<int> kidx(lat.d);
        Vec x(lat.d);
        for (int64_t k = 0; k < sz; ++k) {
            lat.unflatten(k, kidx.data());
            lat.point_of(kidx.data(), x.data());
            out.value.v[k] += M.eta(t, x) * acc[k];
        }
    }
    return out;
}

}  // namespace levy
