#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace beamcoh::detail {

// ln(n!) with a precomputed table for the common range and a Stirling
// series fallback so no libc global state is touched on any thread.
inline double log_factorial(int n) {
    constexpr int kTableSize = 4096;
    static const std::vector<double> table = [] {
        std::vector<double> t(kTableSize);
        t[0] = 0.0;
        for (int i = 1; i < kTableSize; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
        return t;
    }();
    if (n < 0) return -std::numeric_limits<double>::infinity();
    if (n < kTableSize) return table[static_cast<std::size_t>(n)];
    // Stirling series for ln Gamma(n+1), accurate to ~1e-16 relative here.
    const double x = static_cast<double>(n) + 1.0;
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * M_PI) +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

// -x ln x with the 0 ln 0 := 0 convention.
inline double entropy_term(double x) {
    return x > 0.0 ? -x * std::log(x) : 0.0;
}

// 12 significant digits, lowercase scientific where needed; C locale.
inline std::string fmt_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace beamcoh::detail
