#include "ntk/finite_net.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ntk/rng.hpp"

namespace ntk {

namespace {

constexpr double kCSigma = 2.0;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMapW = Eigen::Map<const RowMat>;
using MapW = Eigen::Map<RowMat>;

int arch_depth(const NetArch& arch) {
    return std::visit([](const auto& a) { return a.depth(); }, arch);
}

void validate_arch(const NetArch& arch) {
    if (const auto* m = std::get_if<MlpArch>(&arch)) {
        if (m->widths.size() < 2)
            throw std::invalid_argument("init_net: need an input width and at least one layer");
        for (int d : m->widths)
            if (d <= 0) throw std::invalid_argument("init_net: widths must be positive");
        return;
    }
    const auto& c = std::get<CnnArch>(arch);
    if (c.channels.size() < 2)
        throw std::invalid_argument("init_net: need input channels and at least one layer");
    for (int ch : c.channels)
        if (ch <= 0) throw std::invalid_argument("init_net: channel counts must be positive");
    if (c.P <= 0 || c.Q <= 0)
        throw std::invalid_argument("init_net: image dimensions must be positive");
}

std::vector<std::size_t> layer_offsets(const NetArch& arch) {
    const int L = arch_depth(arch);
    std::vector<std::size_t> offsets(static_cast<std::size_t>(L) + 2, 0);
    if (const auto* m = std::get_if<MlpArch>(&arch)) {
        for (int h = 1; h <= L; ++h)
            offsets[h] = offsets[h - 1] +
                         static_cast<std::size_t>(m->widths[h]) * m->widths[h - 1];
        offsets[L + 1] = offsets[L] + static_cast<std::size_t>(m->widths[L]);
        return offsets;
    }
    const auto& c = std::get<CnnArch>(arch);
    const std::size_t q2 = static_cast<std::size_t>(c.geom.q) * c.geom.q;
    for (int h = 1; h <= L; ++h)
        offsets[h] = offsets[h - 1] +
                     static_cast<std::size_t>(c.channels[h]) * c.channels[h - 1] * q2;
    const std::size_t head = c.head == CnnHead::Dense
                                 ? static_cast<std::size_t>(c.channels[L]) * c.P * c.Q
                                 : static_cast<std::size_t>(c.channels[L]);
    offsets[L + 1] = offsets[L] + head;
    return offsets;
}

// ---------------------------------------------------------------------------
// Fully-connected passes. Inputs sit in the columns of d0 x n matrices so one
// set of matrix products serves single evaluations and full batches alike.

ConstMapW weight_of(const FiniteNetParams& p, const MlpArch& a, int h) {
    const int L = a.depth();
    const int rows = h <= L ? a.widths[h] : 1;
    const int cols = a.widths[h - 1];
    return ConstMapW(p.theta.data() + p.layer_begin(h), rows, cols);
}

struct MlpTrace {
    std::vector<Eigen::MatrixXd> g;  // g[h]: activations after layer h, g[0] = inputs
    std::vector<Eigen::MatrixXd> z;  // z[h-1]: preactivations of layer h
    Eigen::RowVectorXd f;            // network outputs
};

MlpTrace mlp_forward(const FiniteNetParams& p, const MlpArch& a, Eigen::MatrixXd inputs) {
    const int L = a.depth();
    MlpTrace tr;
    tr.g.resize(static_cast<std::size_t>(L) + 1);
    tr.z.resize(static_cast<std::size_t>(L));
    tr.g[0] = std::move(inputs);
    for (int h = 1; h <= L; ++h) {
        tr.z[h - 1].noalias() = weight_of(p, a, h) * tr.g[h - 1];
        const double scale = std::sqrt(kCSigma / a.widths[h]);
        tr.g[h] = (tr.z[h - 1].array() > 0.0).select(scale * tr.z[h - 1].array(), 0.0);
    }
    tr.f.noalias() = weight_of(p, a, L + 1) * tr.g[L];
    return tr;
}

// Gradients with respect to the preactivations of each layer, column per
// input, folded with per-input output weights c: bhat[h](:, i) is
// c_i * df_i/dz^(h). With c = 1 and one column this is the plain backward
// pass.
std::vector<Eigen::MatrixXd> mlp_backward(const FiniteNetParams& p, const MlpArch& a,
                                          const MlpTrace& tr, const Eigen::RowVectorXd& c) {
    const int L = a.depth();
    std::vector<Eigen::MatrixXd> bhat(static_cast<std::size_t>(L) + 1);
    Eigen::MatrixXd up = weight_of(p, a, L + 1).transpose() * c;  // d_L x n
    for (int h = L; h >= 1; --h) {
        const double scale = std::sqrt(kCSigma / a.widths[h]);
        bhat[h] = (tr.z[h - 1].array() > 0.0).select(scale * up.array(), 0.0);
        if (h > 1) up.noalias() = weight_of(p, a, h).transpose() * bhat[h];
    }
    return bhat;
}

// Accumulates sum_i c_i * df_i/dtheta into a flat vector.
void mlp_weight_gradient(const FiniteNetParams& p, const MlpArch& a, const MlpTrace& tr,
                         const Eigen::RowVectorXd& c, std::vector<double>& out) {
    const int L = a.depth();
    const auto bhat = mlp_backward(p, a, tr, c);
    for (int h = 1; h <= L; ++h) {
        MapW g(out.data() + p.layer_begin(h), a.widths[h], a.widths[h - 1]);
        g.noalias() = bhat[h] * tr.g[h - 1].transpose();
    }
    MapW head(out.data() + p.layer_begin(L + 1), 1, a.widths[L]);
    head.noalias() = c * tr.g[L].transpose();
}

Eigen::MatrixXd as_column(std::span<const double> x) {
    Eigen::MatrixXd col(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) col(static_cast<Eigen::Index>(i), 0) = x[i];
    return col;
}

void check_mlp_input(const MlpArch& a, std::span<const double> x) {
    if (static_cast<int>(x.size()) != a.widths[0])
        throw std::invalid_argument("forward: input length does not match the architecture");
}

const MlpArch& require_mlp(const NetArch& arch, const char* who) {
    const auto* a = std::get_if<MlpArch>(&arch);
    if (!a)
        throw std::invalid_argument(std::string(who) +
                                    ": vector inputs require a fully-connected architecture");
    return *a;
}

const CnnArch& require_cnn(const NetArch& arch, const char* who) {
    const auto* a = std::get_if<CnnArch>(&arch);
    if (!a)
        throw std::invalid_argument(std::string(who) +
                                    ": image inputs require a convolutional architecture");
    return *a;
}

// ---------------------------------------------------------------------------
// Convolutional passes. Feature maps are held channel-major, one P*Q plane
// per channel, converted once from the (i, j, channel) input layout.

struct CnnTrace {
    std::vector<std::vector<double>> act;  // act[h]: C_h planes, h = 0..L
    std::vector<std::vector<double>> pre;  // pre[h-1]: preactivation planes of layer h
    double f = 0.0;
};

void check_cnn_input(const CnnArch& a, const ImageTensor& x) {
    if (x.P != a.P || x.Q != a.Q || x.C != a.channels[0])
        throw std::invalid_argument("forward: image shape does not match the architecture");
}

std::vector<double> to_planes(const ImageTensor& x) {
    const std::size_t npos = static_cast<std::size_t>(x.P) * x.Q;
    std::vector<double> planes(static_cast<std::size_t>(x.C) * npos);
    for (int i = 0; i < x.P; ++i)
        for (int j = 0; j < x.Q; ++j)
            for (int c = 0; c < x.C; ++c)
                planes[c * npos + static_cast<std::size_t>(i) * x.Q + j] = x.at(i, j, c);
    return planes;
}

// out_beta(i, j) += sum_{alpha, a, b} W_{alpha beta}(a, b) in_alpha(i+a, j+b),
// zero padded.
void conv_apply(const double* w, const std::vector<double>& in, int c_in, int c_out, int P,
                int Q, int q, std::vector<double>& out) {
    const int r = (q - 1) / 2;
    const std::size_t npos = static_cast<std::size_t>(P) * Q;
    for (int beta = 0; beta < c_out; ++beta) {
        double* dst = out.data() + beta * npos;
        for (int alpha = 0; alpha < c_in; ++alpha) {
            const double* filt = w + (static_cast<std::size_t>(beta) * c_in + alpha) * q * q;
            const double* src = in.data() + alpha * npos;
            for (int i = 0; i < P; ++i) {
                const int a_lo = std::max(-r, -i), a_hi = std::min(r, P - 1 - i);
                for (int j = 0; j < Q; ++j) {
                    const int b_lo = std::max(-r, -j), b_hi = std::min(r, Q - 1 - j);
                    double acc = 0.0;
                    for (int a = a_lo; a <= a_hi; ++a) {
                        const double* frow = filt + static_cast<std::size_t>(a + r) * q + r;
                        const double* srow = src + static_cast<std::size_t>(i + a) * Q + j;
                        for (int b = b_lo; b <= b_hi; ++b) acc += frow[b] * srow[b];
                    }
                    dst[static_cast<std::size_t>(i) * Q + j] += acc;
                }
            }
        }
    }
}

CnnTrace cnn_forward(const FiniteNetParams& p, const CnnArch& a, const ImageTensor& x) {
    const int L = a.depth();
    const int q = a.geom.q;
    const std::size_t npos = static_cast<std::size_t>(a.P) * a.Q;
    CnnTrace tr;
    tr.act.resize(static_cast<std::size_t>(L) + 1);
    tr.pre.resize(static_cast<std::size_t>(L));
    tr.act[0] = to_planes(x);
    for (int h = 1; h <= L; ++h) {
        tr.pre[h - 1].assign(static_cast<std::size_t>(a.channels[h]) * npos, 0.0);
        conv_apply(p.theta.data() + p.layer_begin(h), tr.act[h - 1], a.channels[h - 1],
                   a.channels[h], a.P, a.Q, q, tr.pre[h - 1]);
        const double scale = std::sqrt(kCSigma / (a.channels[h] * q * q));
        tr.act[h].assign(tr.pre[h - 1].size(), 0.0);
        for (std::size_t t = 0; t < tr.pre[h - 1].size(); ++t) {
            const double z = tr.pre[h - 1][t];
            if (z > 0.0) tr.act[h][t] = scale * z;
        }
    }
    const double* w = p.theta.data() + p.layer_begin(L + 1);
    double f = 0.0;
    if (a.head == CnnHead::Dense) {
        for (std::size_t t = 0; t < tr.act[L].size(); ++t) f += w[t] * tr.act[L][t];
    } else {
        for (int beta = 0; beta < a.channels[L]; ++beta) {
            double pooled = 0.0;
            for (std::size_t t = 0; t < npos; ++t) pooled += tr.act[L][beta * npos + t];
            f += w[beta] * pooled / static_cast<double>(npos);
        }
    }
    tr.f = f;
    return tr;
}

GradientVector cnn_gradient(const FiniteNetParams& p, const CnnArch& a, const CnnTrace& tr) {
    const int L = a.depth();
    const int q = a.geom.q;
    const int r = (q - 1) / 2;
    const std::size_t npos = static_cast<std::size_t>(a.P) * a.Q;
    GradientVector grad(p.theta.size(), 0.0);

    // Head layer: gradient in its weights and in the last feature maps.
    std::vector<double> dact(static_cast<std::size_t>(a.channels[L]) * npos);
    const double* wh = p.theta.data() + p.layer_begin(L + 1);
    double* gh = grad.data() + p.layer_begin(L + 1);
    if (a.head == CnnHead::Dense) {
        for (std::size_t t = 0; t < dact.size(); ++t) {
            gh[t] = tr.act[L][t];
            dact[t] = wh[t];
        }
    } else {
        const double inv = 1.0 / static_cast<double>(npos);
        for (int beta = 0; beta < a.channels[L]; ++beta) {
            double pooled = 0.0;
            for (std::size_t t = 0; t < npos; ++t) pooled += tr.act[L][beta * npos + t];
            gh[beta] = pooled * inv;
            for (std::size_t t = 0; t < npos; ++t) dact[beta * npos + t] = wh[beta] * inv;
        }
    }

    for (int h = L; h >= 1; --h) {
        // Through the scaled activation: bdot is the gradient in the
        // preactivations of layer h.
        const double scale = std::sqrt(kCSigma / (a.channels[h] * q * q));
        std::vector<double> bdot(dact.size(), 0.0);
        for (std::size_t t = 0; t < dact.size(); ++t)
            if (tr.pre[h - 1][t] > 0.0) bdot[t] = scale * dact[t];

        const double* w = p.theta.data() + p.layer_begin(h);
        double* gw = grad.data() + p.layer_begin(h);
        std::vector<double> dprev;
        if (h > 1) dprev.assign(static_cast<std::size_t>(a.channels[h - 1]) * npos, 0.0);

        for (int beta = 0; beta < a.channels[h]; ++beta) {
            const double* brow = bdot.data() + beta * npos;
            for (int alpha = 0; alpha < a.channels[h - 1]; ++alpha) {
                const std::size_t fbase =
                    (static_cast<std::size_t>(beta) * a.channels[h - 1] + alpha) * q * q;
                const double* src = tr.act[h - 1].data() + alpha * npos;
                double* dst = h > 1 ? dprev.data() + alpha * npos : nullptr;
                for (int i = 0; i < a.P; ++i) {
                    const int a_lo = std::max(-r, -i), a_hi = std::min(r, a.P - 1 - i);
                    for (int j = 0; j < a.Q; ++j) {
                        const double b_out = brow[static_cast<std::size_t>(i) * a.Q + j];
                        if (b_out == 0.0) continue;
                        const int b_lo = std::max(-r, -j), b_hi = std::min(r, a.Q - 1 - j);
                        for (int da = a_lo; da <= a_hi; ++da) {
                            const std::size_t in_row =
                                static_cast<std::size_t>(i + da) * a.Q + j;
                            const std::size_t f_row =
                                fbase + static_cast<std::size_t>(da + r) * q + r;
                            for (int db = b_lo; db <= b_hi; ++db) {
                                gw[f_row + db] += b_out * src[in_row + db];
                                if (dst) dst[in_row + db] += w[f_row + db] * b_out;
                            }
                        }
                    }
                }
            }
        }
        if (h > 1) dact = std::move(dprev);
    }
    return grad;
}

void zero_untrained(const FiniteNetParams& p, GradientVector& g) {
    for (int h = 1; h <= p.depth() + 1; ++h)
        if (!layer_is_trained(p.arch, h))
            std::fill(g.begin() + static_cast<std::ptrdiff_t>(p.layer_begin(h)),
                      g.begin() + static_cast<std::ptrdiff_t>(p.layer_end(h)), 0.0);
}

template <class Input>
McEstimate mc_estimate_impl(const NetArch& arch, const Input& x, const Input& xp, int num_seeds,
                            std::uint64_t base_seed) {
    if (num_seeds < 2)
        throw std::invalid_argument("mc_ntk_estimate: need at least two seeds for a standard error");
    std::vector<double> values(static_cast<std::size_t>(num_seeds));
    for (int s = 0; s < num_seeds; ++s) {
        const auto params = init_net(arch, seed_stream(base_seed, static_cast<std::uint64_t>(s)));
        values[s] = empirical_kernel(params, x, xp);
    }
    McEstimate out;
    for (double v : values) out.mean += v;
    out.mean /= num_seeds;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (static_cast<double>(num_seeds - 1) * num_seeds));
    return out;
}

template <class Input>
KernelMatrix rf_impl(const FiniteNetParams& params, const std::vector<Input>& inputs) {
    if (inputs.empty()) throw std::invalid_argument("random_feature_kernel: no inputs");
    const std::size_t n = inputs.size();
    KernelMatrix H(n, KernelKind::RandomFeature, params.depth());
    if (const auto* c = std::get_if<CnnArch>(&params.arch)) H.filter_size = c->geom.q;

    auto trained_grad = [&](std::size_t i) {
        GradientVector g = param_gradient(params, inputs[i]);
        zero_untrained(params, g);
        return g;
    };
    auto dot = [](const GradientVector& a, const GradientVector& b) {
        double acc = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) acc += a[t] * b[t];
        return acc;
    };

    // Hold a strip of gradients, dot the strip against itself, then stream
    // each later input past it once. Keeps memory at strip size while every
    // gradient outside the strip is recomputed once per strip.
    const std::size_t budget = 256ull << 20;
    const std::size_t strip =
        std::clamp<std::size_t>(budget / (sizeof(double) * std::max<std::size_t>(params.theta.size(), 1)),
                                1, n);
    std::vector<GradientVector> held;
    for (std::size_t s0 = 0; s0 < n; s0 += strip) {
        const std::size_t s1 = std::min(n, s0 + strip);
        held.clear();
        for (std::size_t i = s0; i < s1; ++i) held.push_back(trained_grad(i));
        for (std::size_t i = s0; i < s1; ++i)
            for (std::size_t j = i; j < s1; ++j)
                H.at(i, j) = H.at(j, i) = dot(held[i - s0], held[j - s0]);
        for (std::size_t i = s1; i < n; ++i) {
            const GradientVector gi = trained_grad(i);
            for (std::size_t j = s0; j < s1; ++j)
                H.at(i, j) = H.at(j, i) = dot(gi, held[j - s0]);
        }
    }
    return H;
}

// Shared training loop. Runs forward first so outputs and loss always match
// the parameters the call leaves behind; the target check (when enabled) and
// the step budget both stop before another update.
TrainState& train_core(TrainState& state, const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, long max_steps, double target_loss,
                       bool stop_at_target) {
    const MlpArch& a = require_mlp(state.params.arch, "train_full_batch");
    if (x.empty() || x.size() != y.size())
        throw std::invalid_argument("train_full_batch: need matching, non-empty inputs and labels");
    const std::size_t n = x.size();
    Eigen::MatrixXd X(a.widths[0], n);
    for (std::size_t i = 0; i < n; ++i) {
        check_mlp_input(a, x[i]);
        for (int d = 0; d < a.widths[0]; ++d) X(d, static_cast<Eigen::Index>(i)) = x[i][d];
    }
    const Eigen::Map<const Eigen::RowVectorXd> ymap(y.data(), static_cast<Eigen::Index>(n));

    std::vector<double> gradient(state.params.theta.size());
    for (long done = 0;; ++done) {
        const MlpTrace tr = mlp_forward(state.params, a, X);
        const Eigen::RowVectorXd u = state.kappa * tr.f;
        const Eigen::RowVectorXd resid = u - ymap;
        state.outputs.assign(u.data(), u.data() + n);
        state.loss = 0.5 * resid.squaredNorm();
        if (!std::isfinite(state.loss)) {
            std::ostringstream msg;
            msg << "training diverged: loss is not finite after " << state.steps
                << " steps (eta " << state.eta << ", kappa " << state.kappa << ")";
            throw std::runtime_error(msg.str());
        }
        if (stop_at_target && state.loss <= target_loss) return state;
        if (done == max_steps) return state;

        const Eigen::RowVectorXd c = state.kappa * resid;
        mlp_weight_gradient(state.params, a, tr, c, gradient);
        for (int h = 1; h <= a.depth() + 1; ++h) {
            if (!layer_is_trained(state.params.arch, h)) continue;
            for (std::size_t t = state.params.layer_begin(h); t < state.params.layer_end(h); ++t)
                state.params.theta[t] -= state.eta * gradient[t];
        }
        ++state.steps;
    }
}

}  // namespace

int FiniteNetParams::depth() const { return arch_depth(arch); }

FiniteNetParams init_net(const NetArch& arch, std::uint64_t seed) {
    validate_arch(arch);
    FiniteNetParams p;
    p.arch = arch;
    p.offsets = layer_offsets(arch);
    p.seed = seed;
    p.theta.resize(p.offsets.back());
    GaussianRng rng(seed);
    for (double& w : p.theta) w = rng.normal();
    return p;
}

double forward(const FiniteNetParams& params, std::span<const double> x) {
    const MlpArch& a = require_mlp(params.arch, "forward");
    check_mlp_input(a, x);
    return mlp_forward(params, a, as_column(x)).f(0);
}

double forward(const FiniteNetParams& params, const ImageTensor& x) {
    const CnnArch& a = require_cnn(params.arch, "forward");
    check_cnn_input(a, x);
    return cnn_forward(params, a, x).f;
}

GradientVector param_gradient(const FiniteNetParams& params, std::span<const double> x) {
    const MlpArch& a = require_mlp(params.arch, "param_gradient");
    check_mlp_input(a, x);
    const MlpTrace tr = mlp_forward(params, a, as_column(x));
    GradientVector grad(params.theta.size());
    Eigen::RowVectorXd one = Eigen::RowVectorXd::Ones(1);
    mlp_weight_gradient(params, a, tr, one, grad);
    return grad;
}

GradientVector param_gradient(const FiniteNetParams& params, const ImageTensor& x) {
    const CnnArch& a = require_cnn(params.arch, "param_gradient");
    check_cnn_input(a, x);
    return cnn_gradient(params, a, cnn_forward(params, a, x));
}

bool layer_is_trained(const NetArch& arch, int h) {
    const int L = arch_depth(arch);
    if (h < 1 || h > L + 1) throw std::invalid_argument("layer_is_trained: layer out of range");
    const auto* c = std::get_if<CnnArch>(&arch);
    if (!c || c->head == CnnHead::Dense) return true;
    return h != 1 && h != L + 1;
}

double empirical_kernel(const FiniteNetParams& params, std::span<const double> x,
                        std::span<const double> xp) {
    const MlpArch& a = require_mlp(params.arch, "empirical_kernel");
    check_mlp_input(a, x);
    check_mlp_input(a, xp);
    const int L = a.depth();
    const MlpTrace tx = mlp_forward(params, a, as_column(x));
    const MlpTrace ty = mlp_forward(params, a, as_column(xp));
    const Eigen::RowVectorXd one = Eigen::RowVectorXd::Ones(1);
    const auto bx = mlp_backward(params, a, tx, one);
    const auto by = mlp_backward(params, a, ty, one);
    // <grad f(x), grad f(x')> factorizes per layer into activation and
    // backward inner products; the output layer contributes the last
    // activations alone.
    double acc = tx.g[L].col(0).dot(ty.g[L].col(0));
    for (int h = 1; h <= L; ++h)
        acc += tx.g[h - 1].col(0).dot(ty.g[h - 1].col(0)) * bx[h].col(0).dot(by[h].col(0));
    return acc;
}

double empirical_kernel(const FiniteNetParams& params, const ImageTensor& x,
                        const ImageTensor& xp) {
    const CnnArch& a = require_cnn(params.arch, "empirical_kernel");
    check_cnn_input(a, x);
    check_cnn_input(a, xp);
    const GradientVector gx = cnn_gradient(params, a, cnn_forward(params, a, x));
    const GradientVector gy = cnn_gradient(params, a, cnn_forward(params, a, xp));
    double acc = 0.0;
    for (int h = 1; h <= a.depth() + 1; ++h) {
        if (!layer_is_trained(params.arch, h)) continue;
        for (std::size_t t = params.layer_begin(h); t < params.layer_end(h); ++t)
            acc += gx[t] * gy[t];
    }
    return acc;
}

McEstimate mc_ntk_estimate(const NetArch& arch, std::span<const double> x,
                           std::span<const double> xp, int num_seeds, std::uint64_t base_seed) {
    std::vector<double> xv(x.begin(), x.end()), xpv(xp.begin(), xp.end());
    return mc_estimate_impl(arch, xv, xpv, num_seeds, base_seed);
}

McEstimate mc_ntk_estimate(const NetArch& arch, const ImageTensor& x, const ImageTensor& xp,
                           int num_seeds, std::uint64_t base_seed) {
    return mc_estimate_impl(arch, x, xp, num_seeds, base_seed);
}

KernelMatrix random_feature_kernel(const FiniteNetParams& params,
                                   const std::vector<ImageTensor>& inputs) {
    return rf_impl(params, inputs);
}

KernelMatrix random_feature_kernel(const FiniteNetParams& params,
                                   const std::vector<std::vector<double>>& inputs) {
    return rf_impl(params, inputs);
}

TrainState& train_full_batch(TrainState& state, const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y, long steps) {
    return train_core(state, x, y, steps, 0.0, false);
}

TrainState& train_to_loss(TrainState& state, const std::vector<std::vector<double>>& x,
                          const std::vector<double>& y, double target_loss, long max_steps) {
    return train_core(state, x, y, max_steps, target_loss, true);
}

}  // namespace ntk
