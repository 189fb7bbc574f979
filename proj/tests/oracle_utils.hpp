#pragma once

// Shared helpers for the test suite. Everything here is deliberately
// independent of the library's computation paths: brute-force loops, direct
// formulas, and plain generators only.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ntk/tensor.hpp"

namespace oracle {

// Distinct RNG from the library's generator on purpose.
inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double unit_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Marsaglia polar normal, spare discarded (simplicity over speed here).
inline double normal(std::mt19937_64& eng) {
    double u, v, s;
    do {
        u = 2.0 * unit_uniform(eng) - 1.0;
        v = 2.0 * unit_uniform(eng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

// Random PSD 2x2 covariance A^T A with N(0,1) entries, optionally scaled.
inline ntk::Cov2 random_cov2(std::mt19937_64& eng, double scale = 1.0) {
    const double a = normal(eng), b = normal(eng), c = normal(eng), d = normal(eng);
    ntk::Cov2 out;
    out.s11 = (a * a + c * c) * scale;
    out.s12 = (a * b + c * d) * scale;
    out.s22 = (b * b + d * d) * scale;
    return out;
}

inline ntk::ImageTensor random_image(std::mt19937_64& eng, int P, int Q, int C) {
    ntk::ImageTensor x(P, Q, C);
    for (auto& v : x.data) v = normal(eng);
    return x;
}

inline std::vector<double> random_vector(std::mt19937_64& eng, int d) {
    std::vector<double> x(d);
    for (auto& v : x) v = normal(eng);
    return x;
}

inline std::vector<double> random_unit_vector(std::mt19937_64& eng, int d) {
    auto x = random_vector(eng, d);
    double n = 0.0;
    for (double v : x) n += v * v;
    n = std::sqrt(n);
    for (auto& v : x) v /= n;
    return x;
}

// Brute-force patch sum straight from the definition, materializing the
// zero-padded loop bounds the slow way.
inline double patch_sum_entry(const ntk::ImageTensor& x, const ntk::ImageTensor& xp, int q,
                              int i, int j, int ip, int jp) {
    const int r = (q - 1) / 2;
    double acc = 0.0;
    for (int c = 0; c < x.C; ++c)
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b) {
                const int u = i + a, v = j + b, up = ip + a, vp = jp + b;
                if (u < 0 || u >= x.P || v < 0 || v >= x.Q) continue;
                if (up < 0 || up >= x.P || vp < 0 || vp >= x.Q) continue;
                acc += x.at(u, v, c) * xp.at(up, vp, c);
            }
    return acc;
}

}  // namespace oracle
