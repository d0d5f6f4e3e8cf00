#pragma once
#include <cstdint>
#include <cmath>
#include <bit>

// Counter-based RNG: Philox4x32-10.
//
// Replica i draws from the stream keyed (seed, i), so results are identical
// no matter how replicas are scheduled across workers.  Within a run the
// generator is used sequentially; the counter layout leaves room to key
// (seed, t, cell) streams if a step is ever parallelised internally.
//
// Checked against the three published known-answer vectors (zeros, all-ones,
// pi digits) in the unit tests.

namespace brw {

class Philox {
  public:
    Philox(uint64_t seed, uint64_t stream)
        : k0_(uint32_t(seed)), k1_(uint32_t(seed >> 32)),
          c2_(uint32_t(stream)), c3_(uint32_t(stream >> 32)) {}

    // raw one-shot block, used by the known-answer tests
    static void block4(const uint32_t ctr[4], const uint32_t key[2], uint32_t out[4]) {
        uint32_t x0 = ctr[0], x1 = ctr[1], x2 = ctr[2], x3 = ctr[3];
        uint32_t K0 = key[0], K1 = key[1];
        for (int r = 0; r < 10; ++r) {
            round_(x0, x1, x2, x3, K0, K1);
            K0 += 0x9E3779B9u;
            K1 += 0xBB67AE85u;
        }
        out[0] = x0; out[1] = x1; out[2] = x2; out[3] = x3;
    }

    uint32_t next_u32() {
        if (have_ == 0) refill_();
        return buf_[--have_];
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32(), lo = next_u32();
        return (hi << 32) | lo;
    }

    // [0,1), 53 random bits
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
    // (0,1], safe for log()
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double normal() {
        if (have_normal_) { have_normal_ = false; return spare_normal_; }
        double u1 = uniform_pos(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 6.28318530717958647692 * u2;
        spare_normal_ = r * std::sin(th);
        have_normal_ = true;
        return r * std::cos(th);
    }

    // uniform in [0,n), unbiased
    uint64_t below(uint64_t n) {
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next_u64(); } while (v >= lim);
        return v % n;
    }

    // number of failures before the z-th success in fair coin flips
    // == sum of z iid Geometric(1/2) on {0,1,...}; exact and fast (bit scan).
    uint64_t nb_half(uint64_t z) {
        uint64_t fails = 0;
        while (z > 0) {
            uint64_t w = next_u64();
            unsigned pc = unsigned(std::popcount(w));
            if (pc < z) {
                z -= pc;
                fails += 64 - pc;
            } else {
                // position of the z-th set bit
                for (uint64_t i = 1; i < z; ++i) w &= w - 1;
                unsigned pos = unsigned(std::countr_zero(w));
                fails += pos - (z - 1);
                return fails;
            }
        }
        return fails;
    }

    // UniformRandomBitGenerator facade for <random> distributions
    using result_type = uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return UINT64_MAX; }
    result_type operator()() { return next_u64(); }

  private:
    static inline void round_(uint32_t& x0, uint32_t& x1, uint32_t& x2, uint32_t& x3,
                              uint32_t K0, uint32_t K1) {
        uint64_t p0 = uint64_t(0xD2511F53u) * x0;
        uint64_t p1 = uint64_t(0xCD9E8D57u) * x2;
        uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
        uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
        uint32_t y0 = hi1 ^ x1 ^ K0;
        uint32_t y1 = lo1;
        uint32_t y2 = hi0 ^ x3 ^ K1;
        uint32_t y3 = lo0;
        x0 = y0; x1 = y1; x2 = y2; x3 = y3;
    }

    void refill_() {
        uint32_t ctr[4] = {uint32_t(block_), uint32_t(block_ >> 32), c2_, c3_};
        uint32_t key[2] = {k0_, k1_};
        block4(ctr, key, buf_);
        ++block_;
        have_ = 4;
    }

    uint32_t k0_, k1_;
    uint32_t c2_, c3_;
    uint64_t block_ = 0;
    uint32_t buf_[4] = {0, 0, 0, 0};
    int have_ = 0;
    bool have_normal_ = false;
    double spare_normal_ = 0.0;
};

} // namespace brw
