#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <cmath>
#include "levy/symbol.hpp"
#include "levy/quadrature.hpp"

using namespace levy;

namespace {

// direct quadrature of -int (e^{isr}-1-isr 1_{r<=1}) r^{-1-a} dr, oscillation-aware:
// graded panels on (0,1], half-period panels on [1,R], two integration-by-parts
// terms for the remainder
cplx h_by_quadrature(double a, double s) {
    if (s == 0) return {0, 0};
    double as = std::abs(s);
    // pull out the leading Taylor terms exactly; the remainders vanish like
    // r^{3-a} and r^{4-a} at the origin, which graded panels handle well
    auto inner = graded_edges(0.0, 1.0, 14, 2.0);
    double re01 = -s * s / (2.0 * (2.0 - a)) +
                  integrate_panels(
                      [&](double r) {
                          double c = std::cos(s * r) - 1.0 + 0.5 * s * s * r * r;
                          return c * std::pow(r, -1.0 - a);
                      },
                      inner, 24);
    double im01 = -s * s * s / (6.0 * (3.0 - a)) +
                  integrate_panels(
                      [&](double r) {
                          double c = std::sin(s * r) - s * r + s * s * s * r * r * r / 6.0;
                          return c * std::pow(r, -1.0 - a);
                      },
                      inner, 24);
    double R = std::max(200.0, 60.0 * M_PI / as);
    double half = M_PI / as;
    // geometric growth near 1 (steep decay), capped at half-period width
    std::vector<double> osc;
    for (double e = 1.0; e < R; e = std::min(1.5 * e, e + half)) osc.push_back(e);
    osc.push_back(R);
    double reOsc = integrate_panels(
        [&](double r) { return std::cos(s * r) * std::pow(r, -1.0 - a); }, osc, 20);
    double imOsc = integrate_panels(
        [&](double r) { return std::sin(s * r) * std::pow(r, -1.0 - a); }, osc, 20);
    // two-term tails from repeated integration by parts
    double p1 = std::pow(R, -1.0 - a), p2 = std::pow(R, -2.0 - a);
    reOsc += -std::sin(s * R) * p1 / s + (1.0 + a) * std::cos(s * R) * p2 / (s * s);
    imOsc += std::cos(s * R) * p1 / s + (1.0 + a) * std::sin(s * R) * p2 / (s * s);
    double re = re01 + reOsc - 1.0 / a;  // subtract exact int_1^inf r^{-1-a} dr
    double im = im01 + imOsc;
    return -cplx{re, im};
}

Model one_ray(double alpha) {
    Model m;
    m.d = 1;
    m.alpha = alpha;
    m.atoms = {{{1.0}, 1.0}};
    return m;
}

}  // namespace

TEST_CASE("closed form matches frozen reference values") {
    struct Row {
        double alpha, s, re, im;
    };
    // computed with 50-digit arithmetic from the closed form and cross-checked
    // against oscillatory quadrature
    const Row rows[] = {
        {0.3, 0.1, 1.9322033690668146, -0.84164964728127552},
        {0.3, -1.0, 3.8552525671549204, 0.53577786862273273},
        {0.3, 10.0, 7.6922401619312421, 10.366322159587173},
        {0.7, 0.1, 0.38712190591820027, -0.42643618613290293},
        {0.7, -1.0, 1.9402055710365992, 0.47453450322271559},
        {0.7, 10.0, 9.7240626281605511, 14.24878586311541},
        {1.3, 0.1, 0.075731291549109096, -0.1847023049435784},
        {1.3, -1.0, 1.5110379209185857, 0.36775443552185637},
        {1.3, 10.0, 30.149170200977803, 25.837744835368529},
        {1.8, 0.1, 0.048054752144427803, -0.10938606453068492},
        {1.8, -1.0, 3.032049880270204, 0.26482727393958556},
        {1.8, 10.0, 191.30941407867759, 49.6601967089392},
    };
    for (const auto& r : rows) {
        cplx h = h_alpha(r.alpha, r.s);
        double scale = std::abs(cplx{r.re, r.im});
        CHECK(std::abs(h.real() - r.re) < 1e-12 * scale);
        CHECK(std::abs(h.imag() - r.im) < 1e-12 * scale);
    }
}

TEST_CASE("closed form agrees with direct quadrature") {
    for (double alpha : {0.3, 0.7, 1.3, 1.8}) {
        for (double s : {0.1, -1.0, 10.0, -4.5}) {
            cplx c = h_alpha(alpha, s);
            cplx q = h_by_quadrature(alpha, s);
            double scale = 1.0 + std::abs(c);
            CHECK(std::abs(c - q) < 2e-5 * scale);
        }
    }
}

TEST_CASE("alpha=1 centering constant") {
    // 1 - Euler gamma; the value of int_1^inf sin(r)/r^2 + int_0^1 (sin r - r)/r^2
    CHECK(c1_const() == doctest::Approx(0.42278433509846713939).epsilon(1e-15));
    std::vector<double> osc;
    for (double e = 1.0; e < 400.0 * M_PI; e += M_PI) osc.push_back(e);
    double q = integrate_panels([](double r) { return std::sin(r) / (r * r); }, osc, 16);
    double R = osc.back();
    q += std::cos(R) / (R * R) * 1.0 + 2.0 * std::sin(R) / (R * R * R);
    q += integrate_panels([](double r) { return (std::sin(r) - r) / (r * r); },
                          graded_edges(0.0, 1.0, 12, 2.0), 20);
    CHECK(q == doctest::Approx(c1_const()).epsilon(1e-6));
}

TEST_CASE("two unit atoms at alpha=1: value at u=2 is 2 pi") {
    Model m;
    m.d = 1;
    m.alpha = 1.0;
    m.atoms = {{{1.0}, 1.0}, {{-1.0}, 1.0}};
    cplx v = psi_stable(m, {2.0});
    CHECK(v.real() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(std::abs(v.imag()) < 1e-14);
}

TEST_CASE("nonnegative real part along rays") {
    for (double alpha : {0.3, 1.0, 1.3, 1.9}) {
        Model m = one_ray(alpha);
        for (double u = -30.0; u <= 30.0; u += 0.37) {
            CHECK(psi_stable(m, {u}).real() >= -1e-14);
        }
    }
}

TEST_CASE("scaling identity with the centering vector, alpha != 1") {
    for (double alpha : {0.4, 0.9, 1.2, 1.7}) {
        Model m;
        m.d = 2;
        m.alpha = alpha;
        double s2 = std::sqrt(0.5);
        m.atoms = {{{1.0, 0.0}, 1.4}, {{s2, s2}, 0.7}, {{0.0, -1.0}, 0.25}};
        Vec g = gamma_vec(m);
        for (double rho : {0.35, 2.0, 7.5}) {
            for (Vec u : {Vec{0.8, -0.3}, Vec{-1.1, 2.2}}) {
                Vec ru = scaled(rho, u);
                cplx lhs = psi_stable(m, ru) + cplx{0, dot(ru, g)};
                cplx rhs = std::pow(rho, alpha) * (psi_stable(m, u) + cplx{0, dot(u, g)});
                CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("scaling identity with the centering vector, alpha = 1") {
    Model m;
    m.d = 2;
    m.alpha = 1.0;
    double s2 = std::sqrt(0.5);
    m.atoms = {{{1.0, 0.0}, 2.0}, {{-s2, s2}, 0.5}};
    Vec g = gamma_vec(m);
    for (double rho : {0.35, 2.0, 7.5}) {
        for (Vec u : {Vec{0.8, -0.3}, Vec{-1.1, 2.2}}) {
            Vec ru = scaled(rho, u);
            cplx lhs = psi_stable(m, ru);
            cplx rhs = rho * psi_stable(m, u) + cplx{0, rho * std::log(rho) * dot(u, g)};
            CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("quadratic, drift and finite-activity pieces of the full exponent") {
    Model m;
    m.d = 1;
    m.alpha = 0.5;
    m.atoms = {};
    m.a = {{0.7}};
    m.b = {1.3};
    cplx v = psi_full(m, {2.0});
    CHECK(v.real() == doctest::Approx(0.7 * 4.0).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(-1.3 * 2.0).epsilon(1e-14));

    // one large jump (no compensation) and one small jump (compensated)
    Model j;
    j.d = 1;
    j.alpha = 0.5;
    j.extra = {{{2.0}, 0.4}, {{0.5}, 1.1}};
    double u = 1.7;
    cplx big = -0.4 * (cplx{std::cos(2.0 * u) - 1.0, std::sin(2.0 * u)});
    cplx small = -1.1 * (cplx{std::cos(0.5 * u) - 1.0, std::sin(0.5 * u) - 0.5 * u});
    cplx expect = big + small;
    CHECK(std::abs(psi_full(j, {u}) - expect) < 1e-14);
}

TEST_CASE("index outside (0,2) is rejected") {
    CHECK_THROWS_AS(h_alpha(2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(h_alpha(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(h_alpha(-0.3, 1.0), std::domain_error);
}
