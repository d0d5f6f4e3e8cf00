#pragma once
#include <cstdint>
#include <string>

// 128-bit particle counts.  Deterministic offspring on a 3-regular tree grows
// like 3^t, so 64 bits die around t=40; 128 bits carry d=3 to t~80 (beyond the
// default horizon).  Anything wider saturates and flags the run approximate.

namespace brw {

using u128 = unsigned __int128;

inline constexpr u128 U128_MAX = ~u128{0};

// a+b, clamped to U128_MAX.  'sat' is sticky.
inline u128 sat_add(u128 a, u128 b, bool& sat) {
    u128 s = a + b;
    if (s < a) { sat = true; return U128_MAX; }
    return s;
}

// a*m for small m, clamped.
inline u128 sat_mul(u128 a, uint64_t m, bool& sat) {
    if (m != 0 && a > U128_MAX / m) { sat = true; return U128_MAX; }
    return a * (u128)m;
}

inline long double to_ld(u128 v) { return static_cast<long double>(v); }

// round a nonnegative long double to u128, clamping at both ends
inline u128 from_ld(long double x, bool& sat) {
    if (x < 0.5L) return 0;
    // 2^128 ~ 3.4e38; long double (80-bit) holds that fine
    if (x >= 340282366920938463463374607431768211455.0L) { sat = true; return U128_MAX; }
    return static_cast<u128>(x + 0.5L);
}

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    char buf[48];
    int i = 48;
    while (v > 0) { buf[--i] = char('0' + int(v % 10)); v /= 10; }
    return std::string(buf + i, 48 - i);
}

// checked narrowing for CSV emission of counts that are small by construction
inline uint64_t to_u64_clamped(u128 v) {
    return v > UINT64_MAX ? UINT64_MAX : static_cast<uint64_t>(v);
}

} // namespace brw
