#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ntk/cntk.hpp"
#include "ntk/kernel_matrix.hpp"
#include "ntk/ntk_fc.hpp"
#include "oracle_utils.hpp"

using namespace ntk;

namespace {

constexpr double kPi = 3.14159265358979323846;

// From-definition recursion, written straight from the layer equations with
// every 2x2 covariance materialized and the general-covariance closed form
//   t    = (s12 (pi - arccos lam) + sqrt(s11 s22 - s12^2)) / (2 pi)
//   tdot = (pi - arccos lam) / (2 pi),   lam = s12 / sqrt(s11 s22)
// evaluated in covariance scale (no normalize-then-rescale organization).
// Shares no code with the library path.
struct DefOracle {
    int P, Q, q, L;
    bool gap;

    static double gen_t(double s11, double s12, double s22) {
        const double denom = std::sqrt(s11 * s22);
        // sqrt(s11 s22 - s12^2) in the factored form (d - s12)(d + s12); the
        // difference form loses all accuracy to cancellation when the
        // correlation sits at +-1.
        const double lo = denom - s12;
        const double hi = denom + s12;
        double disc = lo * hi;
        if (disc < 0) disc = 0;
        double lam = denom > 0 ? s12 / denom : 0.0;
        lam = std::min(1.0, std::max(-1.0, lam));
        return (s12 * (kPi - std::acos(lam)) + std::sqrt(disc)) / (2.0 * kPi);
    }
    static double gen_tdot(double s11, double s12, double s22) {
        const double denom = std::sqrt(s11 * s22);
        double lam = denom > 0 ? s12 / denom : 0.0;
        lam = std::min(1.0, std::max(-1.0, lam));
        return (kPi - std::acos(lam)) / (2.0 * kPi);
    }

    std::size_t idx(int i, int j, int ip, int jp) const {
        return ((static_cast<std::size_t>(i) * Q + j) * P + ip) * Q + jp;
    }

    std::vector<double> patch_sums(const ImageTensor& x, const ImageTensor& xp) const {
        std::vector<double> T(static_cast<std::size_t>(P) * Q * P * Q);
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < Q; ++j)
                for (int ip = 0; ip < P; ++ip)
                    for (int jp = 0; jp < Q; ++jp)
                        T[idx(i, j, ip, jp)] = oracle::patch_sum_entry(x, xp, q, i, j, ip, jp);
        return T;
    }

    std::vector<double> trace_patches(const std::vector<double>& T) const {
        const int r = (q - 1) / 2;
        std::vector<double> out(T.size(), 0.0);
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < Q; ++j)
                for (int ip = 0; ip < P; ++ip)
                    for (int jp = 0; jp < Q; ++jp) {
                        double acc = 0.0;
                        for (int a = -r; a <= r; ++a)
                            for (int b = -r; b <= r; ++b) {
                                const int u = i + a, v = j + b, up = ip + a, vp = jp + b;
                                if (u < 0 || u >= P || v < 0 || v >= Q) continue;
                                if (up < 0 || up >= P || vp < 0 || vp >= Q) continue;
                                acc += T[idx(u, v, up, vp)];
                            }
                        out[idx(i, j, ip, jp)] = acc;
                    }
        return out;
    }

    double value(const ImageTensor& x, const ImageTensor& xp) const {
        auto sxx = patch_sums(x, x);
        auto sxy = patch_sums(x, xp);
        auto syy = patch_sums(xp, xp);
        std::vector<double> theta = gap ? std::vector<double>(sxy.size(), 0.0) : sxy;
        const double scale = 2.0 / (q * q);
        for (int h = 1; h <= L; ++h) {
            std::vector<double> kxx(sxy.size()), kxy(sxy.size()), kdot(sxy.size()),
                kyy(sxy.size());
            for (int i = 0; i < P; ++i)
                for (int j = 0; j < Q; ++j)
                    for (int ip = 0; ip < P; ++ip)
                        for (int jp = 0; jp < Q; ++jp) {
                            const auto e = idx(i, j, ip, jp);
                            const double a = sxx[idx(i, j, i, j)];
                            const double bq = syy[idx(ip, jp, ip, jp)];
                            kxy[e] = scale * gen_t(a, sxy[e], bq);
                            kdot[e] = scale * gen_tdot(a, sxy[e], bq);
                            const double axx = sxx[idx(i, j, i, j)];
                            const double bxx = sxx[idx(ip, jp, ip, jp)];
                            kxx[e] = scale * gen_t(axx, sxx[e], bxx);
                            const double ayy = syy[idx(i, j, i, j)];
                            const double byy = syy[idx(ip, jp, ip, jp)];
                            kyy[e] = scale * gen_t(ayy, syy[e], byy);
                        }
            std::vector<double> mixed(sxy.size());
            for (std::size_t e = 0; e < mixed.size(); ++e) mixed[e] = kdot[e] * theta[e] + kxy[e];
            if (h < L) {
                theta = trace_patches(mixed);
            } else if (gap) {
                for (std::size_t e = 0; e < mixed.size(); ++e) theta[e] = kdot[e] * theta[e];
            } else {
                theta = mixed;
            }
            sxx = trace_patches(kxx);
            sxy = trace_patches(kxy);
            syy = trace_patches(kyy);
        }
        if (gap) {
            double acc = 0.0;
            for (double v : theta) acc += v;
            return acc / static_cast<double>(theta.size());
        }
        double acc = 0.0;
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < Q; ++j) acc += theta[idx(i, j, i, j)];
        return acc;
    }
};

ImageTensor scalar_image(double v) {
    ImageTensor x(1, 1, 1);
    x.at(0, 0, 0) = v;
    return x;
}

}  // namespace

TEST_CASE("layer zero on scalar images") {
    auto x = scalar_image(2.0), y = scalar_image(-3.0);
    CntkConfig vanilla(1, PatchGeometry(1), CntkArch::Vanilla);
    auto st = cntk_layer0(x, y, vanilla);
    CHECK(st.sigma_xy.at(0, 0, 0, 0) == -6.0);
    CHECK(st.theta.at(0, 0, 0, 0) == -6.0);
    CHECK(st.sigma_xx.at(0, 0, 0, 0) == 4.0);
    CHECK(st.sigma_yy.at(0, 0, 0, 0) == 9.0);
    CHECK(st.h == 0);

    CntkConfig gap(2, PatchGeometry(1), CntkArch::GlobalAveragePooling);
    auto sg = cntk_layer0(x, y, gap);
    CHECK(sg.theta.at(0, 0, 0, 0) == 0.0);
    CHECK(sg.sigma_xy.at(0, 0, 0, 0) == -6.0);

    auto z = ImageTensor(2, 2, 1);
    auto sz = cntk_layer0(z, z, CntkConfig(1, PatchGeometry(3), CntkArch::Vanilla));
    for (double v : sz.sigma_xy.data) CHECK(v == 0.0);
    for (double v : sz.theta.data) CHECK(v == 0.0);
}

TEST_CASE("single step on unit scalars") {
    auto x = scalar_image(1.0);
    CntkConfig vanilla(1, PatchGeometry(1), CntkArch::Vanilla);
    auto st = cntk_layer0(x, x, vanilla);
    auto s1 = cntk_step(st, vanilla, /*is_last=*/true);
    CHECK(s1.theta.at(0, 0, 0, 0) == 2.0);
    CHECK(s1.h == 1);

    // Pooled head, depth 2: after the interior step theta holds the traced
    // K alone; the last untrained layer multiplies by Kdot = 1.
    CntkConfig gap(2, PatchGeometry(1), CntkArch::GlobalAveragePooling);
    auto sg = cntk_layer0(x, x, gap);
    auto g1 = cntk_step(sg, gap, false);
    CHECK(g1.theta.at(0, 0, 0, 0) == 1.0);
    auto g2 = cntk_step(g1, gap, true);
    CHECK(g2.theta.at(0, 0, 0, 0) == 1.0);
}

TEST_CASE("scalar degeneracy to the fully-connected kernel") {
    auto eng = oracle::make_engine(41);
    for (int L : {1, 2, 5}) {
        CntkConfig cfg(L, PatchGeometry(1), CntkArch::Vanilla);
        for (int trial = 0; trial < 6; ++trial) {
            const double a = oracle::normal(eng), b = oracle::normal(eng);
            std::vector<double> va{a}, vb{b};
            const double fc = ntk_pair(va, vb, L).theta;
            const double conv = cntk_pair(scalar_image(a), scalar_image(b), cfg);
            CHECK(conv == doctest::Approx(fc).epsilon(1e-12));
        }
        CHECK(cntk_pair(scalar_image(1.0), scalar_image(1.0), cfg) ==
              static_cast<double>(L + 1));
    }
}

TEST_CASE("pooled scalar degeneracy gives depth minus one on unit input") {
    auto one = scalar_image(1.0);
    for (int L : {2, 3, 5}) {
        CntkConfig cfg(L, PatchGeometry(1), CntkArch::GlobalAveragePooling);
        CHECK(cntk_pair(one, one, cfg) == static_cast<double>(L - 1));
    }
    // Depth 1 pooled networks have no trained layer at all; the recursion's
    // literal value is 0.
    CntkConfig l1(1, PatchGeometry(1), CntkArch::GlobalAveragePooling);
    CHECK(cntk_pair(one, one, l1) == 0.0);
}

TEST_CASE("streamlined path equals the from-definition recursion") {
    auto eng = oracle::make_engine(42);
    for (auto arch : {CntkArch::Vanilla, CntkArch::GlobalAveragePooling}) {
        DefOracle oracle_impl{4, 4, 3, 3, arch == CntkArch::GlobalAveragePooling};
        CntkConfig cfg(3, PatchGeometry(3), arch);
        for (int trial = 0; trial < 10; ++trial) {
            auto x = oracle::random_image(eng, 4, 4, 1);
            auto y = oracle::random_image(eng, 4, 4, 1);
            const double expect = oracle_impl.value(x, y);
            CHECK(std::fabs(cntk_pair(x, y, cfg) - expect) <= 1e-10);
            CHECK(std::fabs(cntk_pair_reference(x, y, cfg) - expect) <= 1e-10);
        }
    }
}

TEST_CASE("streamlined path equals the state-recursion reference") {
    auto eng = oracle::make_engine(43);
    CntkConfig cfg(2, PatchGeometry(3), CntkArch::Vanilla);
    for (int trial = 0; trial < 5; ++trial) {
        auto x = oracle::random_image(eng, 3, 5, 2);
        auto y = oracle::random_image(eng, 3, 5, 2);
        const double ref = cntk_pair_reference(x, y, cfg);
        CHECK(cntk_pair(x, y, cfg) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("argument symmetry") {
    auto eng = oracle::make_engine(44);
    auto x = oracle::random_image(eng, 3, 3, 2);
    auto y = oracle::random_image(eng, 3, 3, 2);
    for (auto arch : {CntkArch::Vanilla, CntkArch::GlobalAveragePooling}) {
        CntkConfig cfg(2, PatchGeometry(3), arch);
        CHECK(cntk_pair(x, y, cfg) == doctest::Approx(cntk_pair(y, x, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("positive input scaling") {
    auto eng = oracle::make_engine(45);
    auto x = oracle::random_image(eng, 3, 3, 1);
    auto y = oracle::random_image(eng, 3, 3, 1);
    CntkConfig cfg(3, PatchGeometry(3), CntkArch::Vanilla);
    const double base = cntk_pair(x, y, cfg);
    const double c = 1.7;
    ImageTensor cx = x;
    for (auto& v : cx.data) v *= c;
    CHECK(cntk_pair(cx, y, cfg) == doctest::Approx(c * base).epsilon(1e-10));
}

TEST_CASE("pooled kernel ignores joint translation away from the borders") {
    // Support sits in the middle of an 8x8 canvas with enough margin that
    // zero padding never touches the receptive fields at depth 2.
    auto eng = oracle::make_engine(46);
    ImageTensor x(8, 8, 1), y(8, 8, 1);
    for (int i = 3; i <= 4; ++i)
        for (int j = 3; j <= 4; ++j) {
            x.at(i, j, 0) = oracle::normal(eng);
            y.at(i, j, 0) = oracle::normal(eng);
        }
    ImageTensor xs(8, 8, 1), ys(8, 8, 1);
    for (int i = 3; i <= 4; ++i)
        for (int j = 3; j <= 4; ++j) {
            xs.at(i + 1, j + 1, 0) = x.at(i, j, 0);
            ys.at(i + 1, j + 1, 0) = y.at(i, j, 0);
        }
    CntkConfig cfg(2, PatchGeometry(3), CntkArch::GlobalAveragePooling);
    CHECK(cntk_pair(xs, ys, cfg) == doctest::Approx(cntk_pair(x, y, cfg)).epsilon(1e-12));
}

TEST_CASE("monte carlo recursion oracle") {
    auto eng = oracle::make_engine(47);
    auto x = oracle::random_image(eng, 3, 3, 1);
    auto y = oracle::random_image(eng, 3, 3, 1);
    CntkConfig cfg(2, PatchGeometry(3), CntkArch::Vanilla);
    const double exact = cntk_pair(x, y, cfg);

    SUBCASE("seed determinism") {
        const double a = cntk_pair_naive(x, y, cfg, 20000, 555);
        const double b = cntk_pair_naive(x, y, cfg, 20000, 555);
        CHECK(a == b);
        CHECK(a != cntk_pair_naive(x, y, cfg, 20000, 556));
    }

    SUBCASE("agreement within sampling error") {
        // Five independent runs give a stderr estimate for the mean.
        std::vector<double> runs;
        for (int r = 0; r < 5; ++r) runs.push_back(cntk_pair_naive(x, y, cfg, 60000, 900 + r));
        double mean = 0.0;
        for (double v : runs) mean += v;
        mean /= runs.size();
        double var = 0.0;
        for (double v : runs) var += (v - mean) * (v - mean);
        var /= (runs.size() - 1);
        const double se = std::sqrt(var / runs.size());
        CHECK(std::fabs(mean - exact) <= 3.0 * se + 1e-9 * std::fabs(exact));
    }

    SUBCASE("scalar degeneracy within sampling error") {
        CntkConfig c1(2, PatchGeometry(1), CntkArch::Vanilla);
        auto a = scalar_image(0.8), b = scalar_image(-0.6);
        const double fc = ntk_pair(std::vector<double>{0.8}, std::vector<double>{-0.6}, 2).theta;
        const double mc = cntk_pair_naive(a, b, c1, 400000, 321);
        CHECK(mc == doctest::Approx(fc).epsilon(0.02));
    }
}

TEST_CASE("all-zero images yield a zero kernel on both paths") {
    ImageTensor z(2, 2, 1);
    CntkConfig cfg(2, PatchGeometry(3), CntkArch::Vanilla);
    CHECK(cntk_pair(z, z, cfg) == 0.0);
    CHECK(cntk_pair_reference(z, z, cfg) == 0.0);
    CHECK(cntk_pair_naive(z, z, cfg, 5000, 7) == 0.0);
}

TEST_CASE("cntk_matrix frozen scalar entry and structure") {
    CntkConfig cfg(2, PatchGeometry(1), CntkArch::Vanilla);
    auto H1 = cntk_matrix({scalar_image(1.0)}, cfg);
    CHECK(H1.n == 1);
    CHECK(H1.at(0, 0) == 3.0);
    CHECK(H1.kind == KernelKind::CntkVanilla);

    auto eng = oracle::make_engine(48);
    auto x = oracle::random_image(eng, 2, 2, 1);
    auto H2 = cntk_matrix({x, x}, CntkConfig(2, PatchGeometry(3), CntkArch::Vanilla));
    CHECK(H2.at(0, 0) == doctest::Approx(H2.at(0, 1)).epsilon(1e-12));
    CHECK(H2.at(1, 0) == H2.at(0, 1));
    CHECK(H2.at(1, 1) == doctest::Approx(H2.at(0, 0)).epsilon(1e-12));
}

TEST_CASE("cntk_matrix agrees with pairwise evaluation and stays PSD") {
    auto eng = oracle::make_engine(49);
    std::vector<ImageTensor> xs;
    for (int i = 0; i < 8; ++i) xs.push_back(oracle::random_image(eng, 3, 3, 2));
    for (auto arch : {CntkArch::Vanilla, CntkArch::GlobalAveragePooling}) {
        CntkConfig cfg(2, PatchGeometry(3), arch);
        auto H = cntk_matrix(xs, cfg);
        for (std::size_t i = 0; i < H.n; ++i)
            for (std::size_t j = 0; j < H.n; ++j) {
                CHECK(H.at(i, j) == H.at(j, i));
                CHECK(H.at(i, j) == doctest::Approx(cntk_pair(xs[i], xs[j], cfg)).epsilon(1e-12));
            }
        double maxdiag = 0.0;
        for (std::size_t i = 0; i < H.n; ++i) maxdiag = std::max(maxdiag, H.at(i, i));
        CHECK(min_eigenvalue(H) >= -1e-8 * maxdiag);
    }
}

TEST_CASE("cntk_cross matches pairwise evaluation") {
    auto eng = oracle::make_engine(50);
    std::vector<ImageTensor> a, b;
    for (int i = 0; i < 2; ++i) a.push_back(oracle::random_image(eng, 2, 3, 1));
    for (int i = 0; i < 3; ++i) b.push_back(oracle::random_image(eng, 2, 3, 1));
    CntkConfig cfg(2, PatchGeometry(3), CntkArch::GlobalAveragePooling);
    auto rows = cntk_cross(a, b, cfg);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            CHECK(rows[i * b.size() + j] ==
                  doctest::Approx(cntk_pair(a[i], b[j], cfg)).epsilon(1e-12));
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(CntkConfig(0, PatchGeometry(3), CntkArch::Vanilla), std::invalid_argument);
    ImageTensor a(2, 2, 1), b(3, 2, 1);
    CHECK_THROWS_AS(cntk_pair(a, b, CntkConfig(1, PatchGeometry(3), CntkArch::Vanilla)),
                    std::invalid_argument);
}
