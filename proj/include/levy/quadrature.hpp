#pragma once
#include <vector>
#include <cmath>
#include <map>
#include <functional>
#include <stdexcept>

namespace levy {

struct GaussRule {
    std::vector<double> x, w;  // nodes and weights on (-1, 1)
};

// Newton iteration on Legendre polynomials; cached per order.
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[n - 1 - i] = x;  // cosine seeds descend; store ascending
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

inline double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

// composite rule over a panel partition
inline double integrate_panels(const std::function<double(double)>& f,
                               const std::vector<double>& edges, int n_per_panel) {
    double s = 0;
    for (size_t j = 0; j + 1 < edges.size(); ++j)
        s += integrate_gl(f, edges[j], edges[j + 1], n_per_panel);
    return s;
}

// geometric grading toward `a` (edge ratio `ratio`), then uniform panels to `b`
inline std::vector<double> graded_edges(double a, double b, int n_graded, double ratio) {
    std::vector<double> e;
    e.push_back(a);
    double span = b - a;
    for (int j = n_graded - 1; j >= 1; --j) e.push_back(a + span * std::pow(ratio, -j));
    e.push_back(b);
    return e;
}

}  // namespace levy
