#include "levy/mollify.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include "levy/quadrature.hpp"

namespace levy {

namespace {

double bump(double r) { return std::exp(-1.0 / (1.0 - r * r)); }

// int_{delta/2}^{delta} chi(r/delta) r^{-p} dr; uniform panels resolve the ramp
double ramp_part(double p, double delta) {
    std::vector<double> e;
    for (int i = 0; i <= 8; ++i) e.push_back(0.5 * delta + 0.5 * delta * i / 8.0);
    return integrate_panels(
        [p, delta](double r) { return cutoff_chi(r / delta) * std::pow(r, -p); }, e, 16);
}

}  // namespace

Mollifier make_mollifier(int d, int n, int order) {
    if (d < 1 || d > 2) throw std::invalid_argument("mollifier: d must be 1 or 2");
    if (n < 1) throw std::invalid_argument("mollifier: scale n must be >= 1");
    if (order < 4) throw std::invalid_argument("mollifier: radial order must be >= 4");
    const GaussRule& gr = gauss_legendre(order);
    Mollifier phi;
    phi.d = d;
    phi.n = n;
    // antipodal pairs are pushed adjacently with bitwise-negated nodes, so odd
    // moments cancel exactly in any left-to-right accumulation
    if (d == 1) {
        Vec raw(order);
        double s = 0;
        for (int i = 0; i < order; ++i) {
            double r = 0.5 * (gr.x[i] + 1.0);
            raw[i] = 0.5 * gr.w[i] * bump(r);
            s += raw[i];
        }
        for (int i = 0; i < order; ++i) {
            double z = 0.5 * (gr.x[i] + 1.0) / n;
            double w = raw[i] / (2.0 * s);
            phi.z.push_back({z});
            phi.w.push_back(w);
            phi.z.push_back({-z});
            phi.w.push_back(w);
        }
    } else {
        const int na = 16;  // midpoint angles, antipodal in pairs
        Vec raw(order);
        double s = 0;
        for (int i = 0; i < order; ++i) {
            double r = 0.5 * (gr.x[i] + 1.0);
            raw[i] = 0.5 * gr.w[i] * r * bump(r);
            s += raw[i];
        }
        for (int i = 0; i < order; ++i) {
            double r = 0.5 * (gr.x[i] + 1.0) / n;
            double w = raw[i] / (na * s);
            for (int j = 0; j < na / 2; ++j) {
                double th = 2.0 * M_PI * (j + 0.5) / na;
                double zx = r * std::cos(th), zy = r * std::sin(th);
                phi.z.push_back({zx, zy});
                phi.w.push_back(w);
                phi.z.push_back({-zx, -zy});
                phi.w.push_back(w);
            }
        }
    }
    return phi;
}

double abs_moment(const Mollifier& phi) {
    double s = 0;
    for (size_t i = 0; i < phi.w.size(); ++i) s += phi.w[i] * norm2(phi.z[i]);
    return s;
}

JumpKernelModel mollify_kernel(const JumpKernelModel& M, int n) {
    validate_kernel(M);
    if (n < 1) throw std::invalid_argument("mollify: scale n must be >= 1");
    Mollifier phi = make_mollifier(M.d, n);
    auto convolve = [phi](const std::function<double(double, const Vec&)>& g) {
        return [phi, g](double t, const Vec& x) {
            Vec xs(x.size());
            double s = 0;
            for (size_t i = 0; i < phi.w.size(); ++i) {
                for (size_t a = 0; a < x.size(); ++a) xs[a] = x[a] - phi.z[i][a];
                s += phi.w[i] * g(t, xs);
            }
            return s;
        };
    };
    JumpKernelModel Mn = M;
    if (M.kappa) Mn.kappa = convolve(M.kappa);
    if (M.eta) Mn.eta = convolve(M.eta);
    return Mn;
}

ErrorPair mollify_error(const Field& f, double c3, const JumpKernelModel& M, int n, double t) {
    if (c3 <= 0) throw std::domain_error("mollify error: c3 must be positive");
    if (n < 1) throw std::invalid_argument("mollify error: scale n must be >= 1");
    validate_kernel(M);
    JumpKernelModel Mn = mollify_kernel(M, n);
    std::vector<Field> grad;
    const std::vector<Field>* gp = nullptr;
    if (M.alpha > 1 && M.kappa_sup > 0) {
        for (int a = 0; a < M.d; ++a)
            grad.push_back(apply_multiplier(f, gradient_table(f.lat, a)));
        gp = &grad;
    }
    KField lhs = apply_K(f, Mn, t, gp);
    KField rhs = apply_K(f, M, t, gp);

    // convolution against the bump rule acts spectrally: its transform is the
    // real cosine sum over the node pairs, exact on the trig-poly extension
    Mollifier phi = make_mollifier(M.d, n);
    SpectralVec tab = symbol_table(f.lat, [&phi](const Vec& u) {
        double s = 0;
        for (size_t i = 0; i < phi.w.size(); ++i) s += phi.w[i] * std::cos(dot(u, phi.z[i]));
        return cplx(s, 0.0);
    });
    Field conv = apply_multiplier(rhs.value, tab);

    ErrorPair out;
    for (size_t k = 0; k < conv.v.size(); ++k)
        out.measured = std::max(out.measured, std::abs(lhs.value.v[k] - conv.v[k]));
    out.bound = 4.0 / n * c3 * beta_moment_bound(M);
    return out;
}

JumpKernelModel truncate_kernel(const JumpKernelModel& M, double delta_cut) {
    validate_kernel(M);
    if (!(delta_cut > 0 && delta_cut < 1))
        throw std::domain_error("truncate: delta_cut must lie in (0, 1)");
    JumpKernelModel Md = M;
    Md.delta_cut = delta_cut;
    return Md;
}

double truncated_radial_mass(double beta_prime, double delta_cut) {
    if (!(beta_prime > 0 && beta_prime < 2))
        throw std::domain_error("truncated mass: beta' must lie in (0, 2)");
    if (!(delta_cut > 0 && delta_cut < 1))
        throw std::domain_error("truncated mass: delta_cut must lie in (0, 1)");
    // chi == 1 above delta: the tail is an exact power integral
    return ramp_part(1.0 + beta_prime, delta_cut) +
           (std::pow(delta_cut, -beta_prime) - 1.0) / beta_prime;
}

double compensator_ray(double beta_prime, double delta_cut) {
    if (!(beta_prime > 0 && beta_prime < 2))
        throw std::domain_error("compensator: beta' must lie in (0, 2)");
    if (!(delta_cut > 0 && delta_cut < 1))
        throw std::domain_error("compensator: delta_cut must lie in (0, 1)");
    double tail = beta_prime == 1.0
                      ? -std::log(delta_cut)
                      : (1.0 - std::pow(delta_cut, 1.0 - beta_prime)) / (1.0 - beta_prime);
    return ramp_part(beta_prime, delta_cut) + tail;
}

double total_mass(const JumpKernelModel& M, double t, const Vec& x) {
    validate_kernel(M);
    if (M.delta_cut <= 0) throw std::domain_error("total mass: kernel has no inner cutoff");
    if (static_cast<int>(x.size()) != M.d)
        throw std::invalid_argument("total mass: x has wrong dimension");
    double lam = 0;
    if (M.kappa_sup > 0)
        lam += M.kappa(t, x) * sphere_area(M.d) *
               truncated_radial_mass(M.beta_prime, M.delta_cut);
    if (M.eta_sup > 0 && !M.big.empty()) {
        double rates = 0;
        for (const ExtraJump& j : M.big) rates += j.rate;
        lam += M.eta(t, x) * rates;
    }
    return lam;
}

double total_mass_bound(const JumpKernelModel& M) {
    validate_kernel(M);
    if (M.delta_cut <= 0) throw std::domain_error("total mass: kernel has no inner cutoff");
    double rates = 0;
    for (const ExtraJump& j : M.big) rates += j.rate;
    return M.kappa_sup * sphere_area(M.d) *
               (std::pow(0.5 * M.delta_cut, -M.beta_prime) - 1.0) / M.beta_prime +
           M.eta_sup * rates;
}

Vec compensator(const JumpKernelModel& M, double t, const Vec& x) {
    validate_kernel(M);
    if (static_cast<int>(x.size()) != M.d)
        throw std::invalid_argument("compensator: x has wrong dimension");
    Vec c(M.d, 0.0);
    if (M.alpha <= 1) return c;
    if (M.delta_cut <= 0) throw std::domain_error("compensator: kernel has no inner cutoff");
    if (M.kappa_sup <= 0) return c;
    // same direction sets as the K quadrature; antipodal pairs cancel exactly
    double kr = M.kappa(t, x) * compensator_ray(M.beta_prime, M.delta_cut);
    if (M.d == 1) {
        c[0] += kr;
        c[0] += -kr;
    } else {
        const int na = 16;
        for (int j = 0; j < na / 2; ++j) {
            double th = 2.0 * M_PI * (j + 0.5) / na;
            double wx = (2.0 * M_PI / na) * std::cos(th) * kr;
            double wy = (2.0 * M_PI / na) * std::sin(th) * kr;
            c[0] += wx;
            c[0] += -wx;
            c[1] += wy;
            c[1] += -wy;
        }
    }
    return c;
}

ErrorPair truncation_error(const Field& f, double c2, const JumpKernelModel& M, double delta_cut,
                           double t) {
    if (c2 <= 0) throw std::domain_error("truncation error: c2 must be positive");
    JumpKernelModel Md = truncate_kernel(M, delta_cut);
    std::vector<Field> grad;
    const std::vector<Field>* gp = nullptr;
    if (M.alpha > 1 && M.kappa_sup > 0) {
        for (int a = 0; a < M.d; ++a)
            grad.push_back(apply_multiplier(f, gradient_table(f.lat, a)));
        gp = &grad;
    }
    KField cut = apply_K(f, Md, t, gp);
    KField full = apply_K(f, M, t, gp);
    ErrorPair out;
    for (size_t k = 0; k < cut.value.v.size(); ++k)
        out.measured = std::max(out.measured, std::abs(cut.value.v[k] - full.value.v[k]));
    out.bound = std::pow(delta_cut, M.alpha - M.beta) * c2 * beta_moment_bound(M);
    return out;
}

}  // namespace levy
