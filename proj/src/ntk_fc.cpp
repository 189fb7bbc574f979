#include "ntk/ntk_fc.hpp"

#include <stdexcept>

#include "ntk/relu_kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ntk {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Diagonal stream Sigma^(h)(x, x) for h = 0..L. On the diagonal the
// correlation is 1 and cSigma * t(v, v, v) = v, so the variance carries
// through every layer unchanged. Carrying it exactly (rather than through the
// closed form's rounding) keeps lam = 1 configurations exact downstream,
// where acos would amplify an ulp of drift.
std::vector<double> diagonal_stream(std::span<const double> x, int L) {
    return std::vector<double>(static_cast<std::size_t>(L) + 1, dot(x, x));
}

// Cross recursion given precomputed diagonal streams.
FcKernelTrace pair_with_diagonals(std::span<const double> x, std::span<const double> xp, int L,
                                  const std::vector<double>& dxx,
                                  const std::vector<double>& dyy) {
    FcKernelTrace tr;
    tr.L = L;
    tr.sigmas.resize(static_cast<std::size_t>(L) + 1);
    tr.sigma_dots.resize(static_cast<std::size_t>(L) + 1);
    tr.sigmas_xx = dxx;
    tr.sigmas_yy = dyy;
    tr.sigmas[0] = dot(x, xp);
    for (int h = 1; h <= L; ++h) {
        const Cov2 lambda{dxx[h - 1], tr.sigmas[h - 1], dyy[h - 1]};
        const auto e = relu_expectations(lambda);
        tr.sigmas[h] = kCSigma * e.t;
        tr.sigma_dots[h - 1] = kCSigma * e.tdot;
    }
    tr.sigma_dots[L] = 1.0;  // Sigmadot^(L+1)
    // Horner form of theta = sum_h Sigma^(h-1) prod_{h'>=h} Sigmadot^(h').
    double theta = tr.sigmas[0];
    for (int h = 1; h <= L; ++h) theta = theta * tr.sigma_dots[h - 1] + tr.sigmas[h];
    tr.theta = theta;
    return tr;
}

void check_pair(std::span<const double> x, std::span<const double> xp, int L) {
    if (L < 0) throw std::invalid_argument("ntk_pair: depth must be nonnegative");
    if (x.empty() || xp.empty()) throw std::invalid_argument("ntk_pair: empty input");
    if (x.size() != xp.size()) throw std::invalid_argument("ntk_pair: dimension mismatch");
}

}  // namespace

FcKernelTrace ntk_pair(std::span<const double> x, std::span<const double> xp, int L) {
    check_pair(x, xp, L);
    return pair_with_diagonals(x, xp, L, diagonal_stream(x, L), diagonal_stream(xp, L));
}

KernelMatrix ntk_matrix(const std::vector<std::vector<double>>& inputs, int L) {
    if (inputs.empty()) throw std::invalid_argument("ntk_matrix: empty input list");
    const std::size_t n = inputs.size();
    for (const auto& x : inputs)
        if (x.size() != inputs[0].size())
            throw std::invalid_argument("ntk_matrix: inputs must share a dimension");

    std::vector<std::vector<double>> diags(n);
    for (std::size_t i = 0; i < n; ++i) diags[i] = diagonal_stream(inputs[i], L);

    KernelMatrix H(n, KernelKind::FcNtk, L);
    // Upper triangle (including the diagonal), mirrored afterwards.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        for (std::size_t j = static_cast<std::size_t>(i); j < n; ++j)
            H.at(i, j) = pair_with_diagonals(inputs[i], inputs[j], L, diags[i], diags[j]).theta;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) H.at(i, j) = H.at(j, i);
    return H;
}

std::vector<double> ntk_cross(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b, int L) {
    std::vector<std::vector<double>> da(a.size()), db(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) da[i] = diagonal_stream(a[i], L);
    for (std::size_t j = 0; j < b.size(); ++j) db[j] = diagonal_stream(b[j], L);
    std::vector<double> rows(a.size() * b.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.size()); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            rows[i * b.size() + j] = pair_with_diagonals(a[i], b[j], L, da[i], db[j]).theta;
    return rows;
}

}  // namespace ntk
