#include "ntk/tensor.hpp"

#include <algorithm>

namespace ntk {

bool cov2_is_psd(const Cov2& c) {
    const double slack = 1e-12 * std::max({c.s11, c.s22, 0.0});
    if (c.s11 < -slack || c.s22 < -slack) return false;
    return c.s12 * c.s12 <= c.s11 * c.s22 + slack;
}

PatchKernelTensor patch_inner_sum(const ImageTensor& x, const ImageTensor& xp,
                                  const PatchGeometry& geom) {
    if (x.P != xp.P || x.Q != xp.Q || x.C != xp.C)
        throw std::invalid_argument("patch_inner_sum: image shapes differ");
    const int P = x.P, Q = x.Q, C = x.C, r = geom.half();
    PatchKernelTensor out(P, Q);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < Q; ++j)
            for (int ip = 0; ip < P; ++ip)
                for (int jp = 0; jp < Q; ++jp) {
                    // Offsets valid for both patches at once; padding adds zeros.
                    const int a_lo = std::max({-r, -i, -ip});
                    const int a_hi = std::min({r, P - 1 - i, P - 1 - ip});
                    const int b_lo = std::max({-r, -j, -jp});
                    const int b_hi = std::min({r, Q - 1 - j, Q - 1 - jp});
                    double acc = 0.0;
                    for (int a = a_lo; a <= a_hi; ++a)
                        for (int b = b_lo; b <= b_hi; ++b) {
                            const double* px = &x.data[(static_cast<std::size_t>(i + a) * Q + (j + b)) * C];
                            const double* pp = &xp.data[(static_cast<std::size_t>(ip + a) * Q + (jp + b)) * C];
                            for (int c = 0; c < C; ++c) acc += px[c] * pp[c];
                        }
                    out.at(i, j, ip, jp) = acc;
                }
    return out;
}

PatchKernelTensor trace_over_patches(const PatchKernelTensor& T, const PatchGeometry& geom) {
    const int P = T.P, Q = T.Q, r = geom.half();
    PatchKernelTensor out(P, Q);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < Q; ++j)
            for (int ip = 0; ip < P; ++ip)
                for (int jp = 0; jp < Q; ++jp) {
                    const int a_lo = std::max({-r, -i, -ip});
                    const int a_hi = std::min({r, P - 1 - i, P - 1 - ip});
                    const int b_lo = std::max({-r, -j, -jp});
                    const int b_hi = std::min({r, Q - 1 - j, Q - 1 - jp});
                    double acc = 0.0;
                    for (int a = a_lo; a <= a_hi; ++a)
                        for (int b = b_lo; b <= b_hi; ++b)
                            acc += T.at(i + a, j + b, ip + a, jp + b);
                    out.at(i, j, ip, jp) = acc;
                }
    return out;
}

double trace_diag(const PatchKernelTensor& T) {
    double acc = 0.0;
    for (int i = 0; i < T.P; ++i)
        for (int j = 0; j < T.Q; ++j) acc += T.at(i, j, i, j);
    return acc;
}

double mean_all(const PatchKernelTensor& T) {
    double acc = 0.0;
    for (double v : T.data) acc += v;
    return acc / static_cast<double>(T.data.size());
}

}  // namespace ntk
