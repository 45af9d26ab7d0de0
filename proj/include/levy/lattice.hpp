#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>
#include "levy/vec.hpp"

namespace levy {

using cplx = std::complex<double>;
using SpectralVec = std::vector<cplx>;

// Centered rectangular lattice: axis a spans [center_a - L_a, center_a + L_a)
// with n_a points, paired with the dual frequency grid u = (m - n/2) pi / L.
// Functions represented on the lattice are treated as trigonometric
// polynomials on the periodic box; spectral operations are exact on that
// space, and faithfulness to the free-space problem is tracked by guards.
struct Lattice {
    int d = 1;
    std::vector<int> n;
    std::vector<double> half;
    Vec center;

    static Lattice cube(int d, int n_per_axis, double half_width);

    int64_t size() const {
        int64_t s = 1;
        for (int x : n) s *= x;
        return s;
    }
    double h(int a) const { return 2.0 * half[a] / n[a]; }
    double du(int a) const { return M_PI / half[a]; }
    double cell() const {
        double c = 1;
        for (int a = 0; a < d; ++a) c *= h(a);
        return c;
    }
    void unflatten(int64_t flat, int* idx) const {
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % n[a]);
            flat /= n[a];
        }
    }
    int64_t flatten(const int* idx) const {
        int64_t f = 0;
        for (int a = 0; a < d; ++a) f = f * n[a] + idx[a];
        return f;
    }
    void point_of(const int* idx, double* x) const {
        for (int a = 0; a < d; ++a) x[a] = center[a] - half[a] + idx[a] * h(a);
    }
    void freq_of(const int* idx, double* u) const {
        for (int a = 0; a < d; ++a) u[a] = (idx[a] - n[a] / 2) * du(a);
    }
    bool operator==(const Lattice& o) const {
        return d == o.d && n == o.n && half == o.half && center == o.center;
    }
};

struct Field {
    Lattice lat;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Lattice& l) : lat(l), v(l.size(), 0.0) {}
};

// unnormalized complex FFT over the lattice shape; sign -1 forward, +1 backward
void fft_exec(const std::vector<int>& n, SpectralVec& data, int sign);

// T_m = FFT_forward[(-1)^{|k|} g_k]; the building block all spectral ops share.
// True coefficients: hat g(u_m) = cell * phase_m * T_m (see analyze).
SpectralVec phased_forward(const Field& f);

// inverse of phased_forward (includes the 1/prod(n) normalization);
// if max_imag is given, receives the largest |imaginary part| discarded
Field phased_inverse(const Lattice& lat, SpectralVec data, double* max_imag = nullptr);

// hat g(u_m) = cell * sum_k g_k e^{-i u_m . x_k} at centered frequencies
SpectralVec analyze(const Field& f);

// g_k = (du/2pi)^d * sum_m F_m e^{+i u_m . x_k}
Field synthesize(const Lattice& lat, const SpectralVec& F, double* max_imag = nullptr);

// evaluate a frequency-domain function over the whole grid once
SpectralVec symbol_table(const Lattice& lat, const std::function<cplx(const Vec&)>& S);

// pointwise Fourier multiplier: out = inverse FFT of S(u) * forward FFT
Field apply_multiplier(const Field& f, const SpectralVec& table, double* max_imag = nullptr);

// L^r norm with the cell measure (r = inf -> sup norm)
double lr_norm(const Field& f, double r);
double mass(const Field& f);  // cell * sum of values

// periodic Catmull-Rom interpolation at an arbitrary point (separable, 4^d stencil)
double interp_cubic(const Field& f, const double* x);

// evaluation at points shifted by whole cells (periodic wrap); exact for the
// trigonometric-polynomial extension
Field rolled(const Field& f, const std::vector<int>& shift);

}  // namespace levy
