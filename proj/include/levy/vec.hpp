#pragma once
#include <vector>
#include <cmath>
#include <cstddef>

namespace levy {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec axpy(double c, const Vec& x, const Vec& y) {
    Vec r(y);
    for (size_t i = 0; i < x.size(); ++i) r[i] += c * x[i];
    return r;
}

inline Vec scaled(double c, const Vec& x) {
    Vec r(x);
    for (auto& v : r) v *= c;
    return r;
}

}  // namespace levy
