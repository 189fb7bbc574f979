#include "ntk/cntk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ntk/relu_kernels.hpp"
#include "ntk/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ntk {

namespace {

void check_shapes(const ImageTensor& x, const ImageTensor& xp) {
    if (x.P != xp.P || x.Q != xp.Q || x.C != xp.C)
        throw std::invalid_argument("cntk: image shapes differ");
}

void warn_gap_depth_one() {
    static bool warned = false;
    if (!warned) {
        std::fprintf(stderr,
                     "warning: pooled kernel with depth 1 has no trained layer; value is 0\n");
        warned = true;
    }
}

// Per-position squared patch norms of one image: the diagonal of
// patch_inner_sum(x, x) without materializing the full tensor.
std::vector<double> patch_norm_diag(const ImageTensor& x, const PatchGeometry& geom) {
    const int P = x.P, Q = x.Q, C = x.C, r = geom.half();
    std::vector<double> diag(static_cast<std::size_t>(P) * Q, 0.0);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < Q; ++j) {
            double acc = 0.0;
            for (int a = std::max(-r, -i); a <= std::min(r, P - 1 - i); ++a)
                for (int b = std::max(-r, -j); b <= std::min(r, Q - 1 - j); ++b) {
                    const double* p = &x.data[(static_cast<std::size_t>(i + a) * Q + (j + b)) * C];
                    for (int c = 0; c < C; ++c) acc += p[c] * p[c];
                }
            diag[static_cast<std::size_t>(i) * Q + j] = acc;
        }
    return diag;
}

// Diagonal of the next layer's same-input covariance. On the diagonal the
// correlation is 1, so K(x,x) at (ij,ij) collapses to variance/q^2 and the
// patch trace only needs the neighboring diagonal entries. Scaling per term
// rather than once after the sum follows the traced path's rounding order,
// keeping this stream tight against the full recursion's diagonal.
std::vector<double> advance_diag(const std::vector<double>& diag, int P, int Q,
                                 const PatchGeometry& geom) {
    const int r = geom.half();
    const double inv_q2 = 1.0 / (geom.q * geom.q);
    std::vector<double> next(diag.size(), 0.0);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < Q; ++j) {
            double acc = 0.0;
            for (int a = std::max(-r, -i); a <= std::min(r, P - 1 - i); ++a)
                for (int b = std::max(-r, -j); b <= std::min(r, Q - 1 - j); ++b)
                    acc += diag[static_cast<std::size_t>(i + a) * Q + (j + b)] * inv_q2;
            next[static_cast<std::size_t>(i) * Q + j] = acc;
        }
    return next;
}

// Same-input diagonals for layers 0..L-1, precomputable per input and shared
// across every pair the input participates in.
std::vector<std::vector<double>> diag_series(const ImageTensor& x, const CntkConfig& cfg) {
    std::vector<std::vector<double>> series;
    series.reserve(cfg.L);
    series.push_back(patch_norm_diag(x, cfg.geom));
    for (int h = 1; h < cfg.L; ++h)
        series.push_back(advance_diag(series.back(), x.P, x.Q, cfg.geom));
    return series;
}

double pair_from_diag_series(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg,
                             const std::vector<std::vector<double>>& dx,
                             const std::vector<std::vector<double>>& dy) {
    const int P = x.P, Q = x.Q;
    const std::size_t npos = static_cast<std::size_t>(P) * Q;
    const bool gap = cfg.arch == CntkArch::GlobalAveragePooling;
    if (gap && cfg.L == 1) warn_gap_depth_one();

    PatchKernelTensor sigma = patch_inner_sum(x, xp, cfg.geom);
    PatchKernelTensor theta =
        gap ? PatchKernelTensor(P, Q) : sigma;
    const double scale = kCSigma / (cfg.geom.q * cfg.geom.q);

    PatchKernelTensor K(P, Q), Kdot(P, Q), mixed(P, Q);
    for (int h = 1; h <= cfg.L; ++h) {
        const bool is_last = h == cfg.L;
        const auto& vx = dx[h - 1];
        const auto& vy = dy[h - 1];
        for (std::size_t p = 0; p < npos; ++p) {
            const double a = vx[p];
            double* krow = &K.data[p * npos];
            double* drow = &Kdot.data[p * npos];
            const double* srow = &sigma.data[p * npos];
            for (std::size_t pp = 0; pp < npos; ++pp) {
                const auto e = relu_expectations({a, srow[pp], vy[pp]});
                krow[pp] = scale * e.t;
                drow[pp] = scale * e.tdot;
            }
        }
        if (is_last) {
            if (gap) {
                for (std::size_t e = 0; e < theta.data.size(); ++e)
                    theta.data[e] = Kdot.data[e] * theta.data[e];
            } else {
                for (std::size_t e = 0; e < theta.data.size(); ++e)
                    theta.data[e] = Kdot.data[e] * theta.data[e] + K.data[e];
            }
        } else {
            for (std::size_t e = 0; e < theta.data.size(); ++e)
                mixed.data[e] = Kdot.data[e] * theta.data[e] + K.data[e];
            theta = trace_over_patches(mixed, cfg.geom);
            sigma = trace_over_patches(K, cfg.geom);
        }
    }
    return gap ? mean_all(theta) : trace_diag(theta);
}

// Per-entry covariance pulled from the three full streams of a state.
Cov2 entry_cov(const CntkPairState& st, std::size_t p, std::size_t pp, std::size_t npos) {
    Cov2 c;
    c.s11 = st.sigma_xx.data[p * npos + p];
    c.s12 = st.sigma_xy.data[p * npos + pp];
    c.s22 = st.sigma_yy.data[pp * npos + pp];
    return c;
}

}  // namespace

CntkPairState cntk_layer0(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg) {
    check_shapes(x, xp);
    CntkPairState st;
    st.sigma_xx = patch_inner_sum(x, x, cfg.geom);
    st.sigma_xy = patch_inner_sum(x, xp, cfg.geom);
    st.sigma_yy = patch_inner_sum(xp, xp, cfg.geom);
    st.theta = cfg.arch == CntkArch::GlobalAveragePooling ? PatchKernelTensor(x.P, x.Q)
                                                          : st.sigma_xy;
    st.h = 0;
    return st;
}

CntkPairState cntk_step(const CntkPairState& state, const CntkConfig& cfg, bool is_last) {
    const int P = state.sigma_xy.P, Q = state.sigma_xy.Q;
    const std::size_t npos = static_cast<std::size_t>(P) * Q;
    const double scale = kCSigma / (cfg.geom.q * cfg.geom.q);
    const bool gap = cfg.arch == CntkArch::GlobalAveragePooling;

    PatchKernelTensor kxx(P, Q), kxy(P, Q), kyy(P, Q), kdot(P, Q);
    for (std::size_t p = 0; p < npos; ++p)
        for (std::size_t pp = 0; pp < npos; ++pp) {
            const auto e = p * npos + pp;
            const auto cross = entry_cov(state, p, pp, npos);
            const auto exy = relu_expectations(cross);
            kxy.data[e] = scale * exy.t;
            kdot.data[e] = scale * exy.tdot;
            Cov2 cxx{state.sigma_xx.data[p * npos + p], state.sigma_xx.data[e],
                     state.sigma_xx.data[pp * npos + pp]};
            kxx.data[e] = scale * relu_expectations(cxx).t;
            Cov2 cyy{state.sigma_yy.data[p * npos + p], state.sigma_yy.data[e],
                     state.sigma_yy.data[pp * npos + pp]};
            kyy.data[e] = scale * relu_expectations(cyy).t;
        }

    CntkPairState next;
    next.h = state.h + 1;
    PatchKernelTensor mixed(P, Q);
    if (is_last) {
        next.theta = PatchKernelTensor(P, Q);
        for (std::size_t e = 0; e < mixed.data.size(); ++e)
            next.theta.data[e] = gap ? kdot.data[e] * state.theta.data[e]
                                     : kdot.data[e] * state.theta.data[e] + kxy.data[e];
    } else {
        for (std::size_t e = 0; e < mixed.data.size(); ++e)
            mixed.data[e] = kdot.data[e] * state.theta.data[e] + kxy.data[e];
        next.theta = trace_over_patches(mixed, cfg.geom);
    }
    next.sigma_xx = trace_over_patches(kxx, cfg.geom);
    next.sigma_xy = trace_over_patches(kxy, cfg.geom);
    next.sigma_yy = trace_over_patches(kyy, cfg.geom);
    return next;
}

double cntk_pair(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg) {
    check_shapes(x, xp);
    return pair_from_diag_series(x, xp, cfg, diag_series(x, cfg), diag_series(xp, cfg));
}

double cntk_pair_reference(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg) {
    check_shapes(x, xp);
    const bool gap = cfg.arch == CntkArch::GlobalAveragePooling;
    if (gap && cfg.L == 1) warn_gap_depth_one();
    auto st = cntk_layer0(x, xp, cfg);
    for (int h = 1; h <= cfg.L; ++h) st = cntk_step(st, cfg, h == cfg.L);
    return gap ? mean_all(st.theta) : trace_diag(st.theta);
}

double cntk_pair_naive(const ImageTensor& x, const ImageTensor& xp, const CntkConfig& cfg,
                       std::int64_t mc_samples, std::uint64_t seed) {
    check_shapes(x, xp);
    const int P = x.P, Q = x.Q;
    const std::size_t npos = static_cast<std::size_t>(P) * Q;
    const double scale = kCSigma / (cfg.geom.q * cfg.geom.q);
    const bool gap = cfg.arch == CntkArch::GlobalAveragePooling;
    if (gap && cfg.L == 1) warn_gap_depth_one();

    auto st = cntk_layer0(x, xp, cfg);
    std::uint64_t stream = 0;
    for (int h = 1; h <= cfg.L; ++h) {
        const bool is_last = h == cfg.L;
        PatchKernelTensor kxx(P, Q), kxy(P, Q), kyy(P, Q), kdot(P, Q);
        for (std::size_t p = 0; p < npos; ++p)
            for (std::size_t pp = 0; pp < npos; ++pp) {
                const auto e = p * npos + pp;
                const auto cross = entry_cov(st, p, pp, npos);
                const auto exy = mc_relu_expectations(cross, mc_samples, seed_stream(seed, stream++));
                kxy.data[e] = scale * exy.t;
                kdot.data[e] = scale * exy.tdot;
                Cov2 cxx{st.sigma_xx.data[p * npos + p], st.sigma_xx.data[e],
                         st.sigma_xx.data[pp * npos + pp]};
                kxx.data[e] =
                    scale * mc_relu_expectations(cxx, mc_samples, seed_stream(seed, stream++)).t;
                Cov2 cyy{st.sigma_yy.data[p * npos + p], st.sigma_yy.data[e],
                         st.sigma_yy.data[pp * npos + pp]};
                kyy.data[e] =
                    scale * mc_relu_expectations(cyy, mc_samples, seed_stream(seed, stream++)).t;
            }
        CntkPairState next;
        next.h = st.h + 1;
        if (is_last) {
            next.theta = PatchKernelTensor(P, Q);
            for (std::size_t e = 0; e < kxy.data.size(); ++e)
                next.theta.data[e] = gap ? kdot.data[e] * st.theta.data[e]
                                         : kdot.data[e] * st.theta.data[e] + kxy.data[e];
        } else {
            PatchKernelTensor mixed(P, Q);
            for (std::size_t e = 0; e < kxy.data.size(); ++e)
                mixed.data[e] = kdot.data[e] * st.theta.data[e] + kxy.data[e];
            next.theta = trace_over_patches(mixed, cfg.geom);
        }
        next.sigma_xx = trace_over_patches(kxx, cfg.geom);
        next.sigma_xy = trace_over_patches(kxy, cfg.geom);
        next.sigma_yy = trace_over_patches(kyy, cfg.geom);
        st = std::move(next);
    }
    return gap ? mean_all(st.theta) : trace_diag(st.theta);
}

KernelMatrix cntk_matrix(const std::vector<ImageTensor>& inputs, const CntkConfig& cfg) {
    if (inputs.empty()) throw std::invalid_argument("cntk_matrix: empty input list");
    for (const auto& im : inputs) check_shapes(inputs[0], im);
    const std::size_t n = inputs.size();

    std::vector<std::vector<std::vector<double>>> diags(n);
    for (std::size_t i = 0; i < n; ++i) diags[i] = diag_series(inputs[i], cfg);

    KernelMatrix H(n,
                   cfg.arch == CntkArch::GlobalAveragePooling ? KernelKind::CntkGap
                                                              : KernelKind::CntkVanilla,
                   cfg.L);
    H.filter_size = cfg.geom.q;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        for (std::size_t j = static_cast<std::size_t>(i); j < n; ++j)
            H.at(i, j) = pair_from_diag_series(inputs[i], inputs[j], cfg, diags[i], diags[j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) H.at(i, j) = H.at(j, i);
    return H;
}

std::vector<double> cntk_cross(const std::vector<ImageTensor>& a,
                               const std::vector<ImageTensor>& b, const CntkConfig& cfg) {
    if (a.empty() || b.empty()) throw std::invalid_argument("cntk_cross: empty input list");
    for (const auto& im : a) check_shapes(a[0], im);
    for (const auto& im : b) check_shapes(a[0], im);

    std::vector<std::vector<std::vector<double>>> da(a.size()), db(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) da[i] = diag_series(a[i], cfg);
    for (std::size_t j = 0; j < b.size(); ++j) db[j] = diag_series(b[j], cfg);

    std::vector<double> rows(a.size() * b.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.size()); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            rows[i * b.size() + j] = pair_from_diag_series(a[i], b[j], cfg, da[i], db[j]);
    return rows;
}

}  // namespace ntk
