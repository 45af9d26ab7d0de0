#include "levy/lattice.hpp"
#include <fftw3.h>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace levy {

Lattice Lattice::cube(int d, int n_per_axis, double half_width) {
    if (n_per_axis % 2 != 0) throw std::domain_error("lattice size must be even");
    Lattice l;
    l.d = d;
    l.n.assign(d, n_per_axis);
    l.half.assign(d, half_width);
    l.center.assign(d, 0.0);
    return l;
}

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr, bwd = nullptr;
    fftw_complex* buf = nullptr;
    int64_t size = 0;
};

PlanPair& plans_for(const std::vector<int>& n) {
    static std::map<std::vector<int>, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanPair p;
    p.size = 1;
    for (int x : n) p.size *= x;
    p.buf = fftw_alloc_complex(p.size);
    p.fwd = fftw_plan_dft(static_cast<int>(n.size()), n.data(), p.buf, p.buf,
                          FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft(static_cast<int>(n.size()), n.data(), p.buf, p.buf,
                          FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(n, p).first->second;
}

// parity of sum of multi-index entries, iterated in flat (row-major) order
class ParityWalker {
  public:
    explicit ParityWalker(const std::vector<int>& n) : n_(n), idx_(n.size(), 0), parity_(0) {}
    int parity() const { return parity_; }
    void advance() {
        for (int a = static_cast<int>(n_.size()) - 1; a >= 0; --a) {
            ++idx_[a];
            parity_ ^= 1;
            if (idx_[a] < n_[a]) return;
            // wrap n_a-1 -> 0: the ++ flip accounted the value as n_a, which has
            // the right parity iff n_a is even
            idx_[a] = 0;
            if (n_[a] % 2 == 1) parity_ ^= 1;
        }
    }

  private:
    const std::vector<int>& n_;
    std::vector<int> idx_;
    int parity_;
};

}  // namespace

void fft_exec(const std::vector<int>& n, SpectralVec& data, int sign) {
    PlanPair& p = plans_for(n);
    if (static_cast<int64_t>(data.size()) != p.size)
        throw std::invalid_argument("fft_exec: size mismatch");
    std::memcpy(static_cast<void*>(p.buf), static_cast<const void*>(data.data()),
                sizeof(fftw_complex) * p.size);
    fftw_execute(sign < 0 ? p.fwd : p.bwd);
    std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(p.buf),
                sizeof(fftw_complex) * p.size);
}

SpectralVec phased_forward(const Field& f) {
    const Lattice& lat = f.lat;
    int64_t sz = lat.size();
    SpectralVec data(sz);
    ParityWalker pw(lat.n);
    for (int64_t k = 0; k < sz; ++k, pw.advance())
        data[k] = pw.parity() ? -f.v[k] : f.v[k];
    fft_exec(lat.n, data, -1);
    return data;
}

Field phased_inverse(const Lattice& lat, SpectralVec data, double* max_imag) {
    fft_exec(lat.n, data, +1);
    int64_t sz = lat.size();
    double scale = 1.0 / static_cast<double>(sz);
    Field out(lat);
    double mi = 0;
    ParityWalker pw(lat.n);
    for (int64_t k = 0; k < sz; ++k, pw.advance()) {
        cplx z = data[k] * scale;
        out.v[k] = pw.parity() ? -z.real() : z.real();
        mi = std::max(mi, std::abs(z.imag()));
    }
    if (max_imag) *max_imag = mi;
    return out;
}

namespace {

// phase_m = (-1)^{sum(m_a - n_a/2)} e^{-i u_m . center}
SpectralVec phase_table(const Lattice& lat) {
    int64_t sz = lat.size();
    SpectralVec ph(sz);
    std::vector<int> idx(lat.d);
    std::vector<double> u(lat.d);
    for (int64_t m = 0; m < sz; ++m) {
        lat.unflatten(m, idx.data());
        lat.freq_of(idx.data(), u.data());
        int par = 0;
        double ucen = 0;
        for (int a = 0; a < lat.d; ++a) {
            par ^= (idx[a] - lat.n[a] / 2) & 1;
            ucen += u[a] * lat.center[a];
        }
        cplx z(std::cos(ucen), -std::sin(ucen));
        ph[m] = par ? -z : z;
    }
    return ph;
}

}  // namespace

SpectralVec analyze(const Field& f) {
    SpectralVec T = phased_forward(f);
    SpectralVec ph = phase_table(f.lat);
    double cell = f.lat.cell();
    for (size_t m = 0; m < T.size(); ++m) T[m] *= cell * ph[m];
    return T;
}

Field synthesize(const Lattice& lat, const SpectralVec& F, double* max_imag) {
    SpectralVec ph = phase_table(lat);
    SpectralVec W(F.size());
    double inv_cell = 1.0 / lat.cell();
    for (size_t m = 0; m < F.size(); ++m) W[m] = F[m] * std::conj(ph[m]) * inv_cell;
    return phased_inverse(lat, std::move(W), max_imag);
}

SpectralVec symbol_table(const Lattice& lat, const std::function<cplx(const Vec&)>& S) {
    int64_t sz = lat.size();
    SpectralVec t(sz);
    std::vector<int> idx(lat.d);
    Vec u(lat.d);
    for (int64_t m = 0; m < sz; ++m) {
        lat.unflatten(m, idx.data());
        lat.freq_of(idx.data(), u.data());
        t[m] = S(u);
    }
    return t;
}

Field apply_multiplier(const Field& f, const SpectralVec& table, double* max_imag) {
    SpectralVec T = phased_forward(f);
    for (size_t m = 0; m < T.size(); ++m) T[m] *= table[m];
    return phased_inverse(f.lat, std::move(T), max_imag);
}

double lr_norm(const Field& f, double r) {
    if (std::isinf(r)) {
        double m = 0;
        for (double x : f.v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0;
    for (double x : f.v) s += std::pow(std::abs(x), r);
    return std::pow(f.lat.cell() * s, 1.0 / r);
}

double mass(const Field& f) {
    double s = 0;
    for (double x : f.v) s += x;
    return f.lat.cell() * s;
}

namespace {
inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 +
                           t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}
}  // namespace

double interp_cubic(const Field& f, const double* x) {
    const Lattice& lat = f.lat;
    int d = lat.d;
    int base[3];
    double frac[3];
    for (int a = 0; a < d; ++a) {
        double rel = (x[a] - (lat.center[a] - lat.half[a])) / lat.h(a);
        double fl = std::floor(rel);
        base[a] = static_cast<int>(fl);
        frac[a] = rel - fl;
    }
    // separable: gather the 4^d stencil with periodic wrap, collapse last axis first
    int idx[3];
    std::function<double(int, const int*)> eval = [&](int axis, const int* off) -> double {
        if (axis == d) {
            for (int a = 0; a < d; ++a) {
                int k = (base[a] + off[a] - 1) % lat.n[a];
                if (k < 0) k += lat.n[a];
                idx[a] = k;
            }
            return f.v[lat.flatten(idx)];
        }
        int o[3] = {off[0], off[1], off[2]};
        double p[4];
        for (int j = 0; j < 4; ++j) {
            o[axis] = j;
            p[j] = eval(axis + 1, o);
        }
        return catmull_rom(p[0], p[1], p[2], p[3], frac[axis]);
    };
    int off0[3] = {0, 0, 0};
    return eval(0, off0);
}

Field rolled(const Field& f, const std::vector<int>& shift) {
    const Lattice& lat = f.lat;
    Field out(lat);
    int64_t sz = lat.size();
    std::vector<int> idx(lat.d);
    for (int64_t k = 0; k < sz; ++k) {
        lat.unflatten(k, idx.data());
        for (int a = 0; a < lat.d; ++a) {
            idx[a] = (idx[a] + shift[a]) % lat.n[a];
            if (idx[a] < 0) idx[a] += lat.n[a];
        }
        out.v[k] = f.v[lat.flatten(idx.data())];
    }
    return out;
}

}  // namespace levy
