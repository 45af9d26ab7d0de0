#pragma once
#include <cstdint>
#include <cmath>

namespace levy {

// Philox4x32-10 counter-based generator. Streams are indexed by (seed, stream):
// path i of a Monte Carlo run owns stream i, so any path can be regenerated in
// isolation and runs are reproducible regardless of scheduling.
class Rng {
  public:
    Rng(uint64_t seed, uint64_t stream) : ctr_(0), have_(0), cached_normal_(false) {
        key_[0] = static_cast<uint32_t>(seed);
        key_[1] = static_cast<uint32_t>(seed >> 32);
        stream_[0] = static_cast<uint32_t>(stream);
        stream_[1] = static_cast<uint32_t>(stream >> 32);
    }

    uint32_t next_u32() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    // uniform on (0,1), 53-bit resolution, never exactly 0 or 1
    double uniform() {
        uint64_t hi = next_u32(), lo = next_u32();
        uint64_t x = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(x) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (cached_normal_) {
            cached_normal_ = false;
            return cache_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 6.283185307179586476925286766559 * u2;
        cache_ = r * std::sin(th);
        cached_normal_ = true;
        return r * std::cos(th);
    }

    double exponential() { return -std::log(uniform()); }

    // exact (product method); large means are split additively
    uint64_t poisson(double mean) {
        uint64_t n = 0;
        while (mean > 30.0) {
            n += poisson_small(30.0);
            mean -= 30.0;
        }
        return n + poisson_small(mean);
    }

  private:
    uint32_t key_[2], stream_[2];
    uint64_t ctr_;
    uint32_t buf_[4];
    int have_;
    bool cached_normal_;
    double cache_;

    static void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
        uint64_t p = static_cast<uint64_t>(a) * b;
        hi = static_cast<uint32_t>(p >> 32);
        lo = static_cast<uint32_t>(p);
    }

    void refill() {
        uint32_t c0 = static_cast<uint32_t>(ctr_), c1 = static_cast<uint32_t>(ctr_ >> 32);
        uint32_t x0 = c0, x1 = c1, x2 = stream_[0], x3 = stream_[1];
        uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, x0, hi0, lo0);
            mulhilo(0xCD9E8D57u, x2, hi1, lo1);
            uint32_t y0 = hi1 ^ x1 ^ k0, y1 = lo1, y2 = hi0 ^ x3 ^ k1, y3 = lo0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = x0; buf_[1] = x1; buf_[2] = x2; buf_[3] = x3;
        have_ = 4;
        ++ctr_;
    }

    uint64_t poisson_small(double mean) {
        if (mean <= 0) return 0;
        double limit = std::exp(-mean), prod = uniform();
        uint64_t n = 0;
        while (prod > limit) {
            prod *= uniform();
            ++n;
        }
        return n;
    }
};

}  // namespace levy
