#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ntk/cntk.hpp"
#include "ntk/data_io.hpp"
#include "ntk/finite_net.hpp"
#include "ntk/kernel_regression.hpp"
#include "ntk/ntk_fc.hpp"
#include "ntk/rng.hpp"

using json = nlohmann::json;
using namespace ntk;

namespace {

struct DatasetOptions {
    std::string data_path;
    std::string shape = "8";  // "d" for unit-sphere vectors, "PxQxC" for images
    std::size_t n = 32;
    int k = 2;
    std::uint64_t seed = 1;
    std::size_t limit = 0;
    std::vector<int> classes;
    int downsample_factor = 1;
    bool normalize = false;
};

struct KernelOptions {
    std::string kind = "fc-ntk";
    int depth = 3;
    int filter_size = 3;
    bool filter_size_set = false;
};

void add_dataset_flags(CLI::App* cmd, DatasetOptions& opt) {
    cmd->add_option("--data", opt.data_path,
                    "CIFAR-10 binary file, or a directory holding data_batch_1.bin");
    cmd->add_option("--shape", opt.shape,
                    "synthetic input shape: a dimension (unit sphere) or PxQxC images");
    cmd->add_option("--n", opt.n, "synthetic sample count");
    cmd->add_option("--k", opt.k, "synthetic class count");
    cmd->add_option("--seed", opt.seed, "base seed");
    cmd->add_option("--limit", opt.limit, "max records to read from --data (0 = all)");
    cmd->add_option("--classes", opt.classes,
                    "keep only these class labels, relabeled 0..m-1 in the given order");
    cmd->add_option("--downsample", opt.downsample_factor,
                    "average-pool factor applied after loading");
    cmd->add_flag("--normalize", opt.normalize, "rescale each image to unit norm (last step)");
}

void add_kernel_flags(CLI::App* cmd, KernelOptions& opt) {
    cmd->add_option("--kernel", opt.kind, "fc-ntk | cntk-vanilla | cntk-gap")
        ->check(CLI::IsMember({"fc-ntk", "cntk-vanilla", "cntk-gap"}));
    cmd->add_option("--depth", opt.depth, "number of hidden / convolutional layers L")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--filter-size", opt.filter_size, "convolution filter side (odd)")
        ->each([&opt](const std::string&) { opt.filter_size_set = true; });
}

int resolve_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    return threads > 0 ? threads : omp_get_max_threads();
#else
    return 1;
#endif
}

bool parse_shape(const std::string& s, int& P, int& Q, int& C) {
    int vals[3] = {0, 0, 0};
    int count = 0;
    std::size_t pos = 0;
    while (pos < s.size() && count < 3) {
        std::size_t used = 0;
        vals[count] = std::stoi(s.substr(pos), &used);
        pos += used;
        ++count;
        if (pos < s.size()) {
            if (s[pos] != 'x') return false;
            ++pos;
        }
    }
    if (pos != s.size()) return false;
    if (count == 1) {
        P = Q = 1;
        C = vals[0];
    } else if (count == 3) {
        P = vals[0];
        Q = vals[1];
        C = vals[2];
    } else {
        return false;
    }
    return P > 0 && Q > 0 && C > 0;
}

LabeledDataset select_classes(const LabeledDataset& ds, const std::vector<int>& classes) {
    LabeledDataset out;
    out.k = static_cast<int>(classes.size());
    out.provenance = ds.provenance + ":classes=";
    for (std::size_t i = 0; i < classes.size(); ++i)
        out.provenance += (i ? "," : "") + std::to_string(classes[i]);
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
        const auto it = std::find(classes.begin(), classes.end(), ds.labels[i]);
        if (it == classes.end()) continue;
        out.images.push_back(ds.images[i]);
        out.labels.push_back(static_cast<int>(it - classes.begin()));
    }
    return out;
}

LabeledDataset load_dataset(const DatasetOptions& opt) {
    LabeledDataset ds;
    if (!opt.data_path.empty()) {
        std::string path = opt.data_path;
        if (std::filesystem::is_directory(path)) path += "/data_batch_1.bin";
        ds = read_cifar10_bin(path, opt.limit, false);
    } else {
        int P = 0, Q = 0, C = 0;
        if (!parse_shape(opt.shape, P, Q, C))
            throw std::invalid_argument("--shape must be a dimension or PxQxC");
        ds = synthetic_image_dataset(opt.n, P, Q, C, opt.k, opt.seed);
    }
    if (!opt.classes.empty()) ds = select_classes(ds, opt.classes);
    if (opt.downsample_factor != 1) ds = downsample(ds, opt.downsample_factor);
    if (opt.normalize) ds = unit_normalize(ds);
    if (ds.images.empty()) throw std::runtime_error("dataset resolved to zero records");
    return ds;
}

std::vector<std::vector<double>> flatten_all(const std::vector<ImageTensor>& images) {
    std::vector<std::vector<double>> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(flatten(img));
    return out;
}

KernelMatrix make_gram(const std::vector<ImageTensor>& images, const KernelOptions& kopt) {
    if (kopt.kind == "fc-ntk") return ntk_matrix(flatten_all(images), kopt.depth);
    const CntkArch arch =
        kopt.kind == "cntk-gap" ? CntkArch::GlobalAveragePooling : CntkArch::Vanilla;
    return cntk_matrix(images, CntkConfig(kopt.depth, PatchGeometry(kopt.filter_size), arch));
}

void reject_filter_size_for_fc(const KernelOptions& kopt) {
    if (kopt.kind == "fc-ntk" && kopt.filter_size_set)
        throw CLI::ValidationError("--filter-size only applies to convolutional kernels");
}

json dataset_manifest(const LabeledDataset& ds, const DatasetOptions& opt) {
    json j;
    j["provenance"] = ds.provenance;
    j["n"] = ds.images.size();
    j["k"] = ds.k;
    j["shape"] = std::to_string(ds.images[0].P) + "x" + std::to_string(ds.images[0].Q) + "x" +
                 std::to_string(ds.images[0].C);
    j["seed"] = opt.seed;
    j["limit"] = opt.limit;
    j["downsample"] = opt.downsample_factor;
    j["normalize"] = opt.normalize;
    j["checksum"] = dataset_checksum(ds);
    return j;
}

void emit_results(const json& manifest, const std::string& out_path) {
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open results path " + out_path);
        out << manifest.dump(2) << "\n";
    }
    std::cout << "RESULTS " << manifest.dump() << "\n";
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------

int cmd_kernel(const DatasetOptions& dopt, const KernelOptions& kopt, const std::string& out,
               int threads) {
    reject_filter_size_for_fc(kopt);
    if (out.empty()) throw CLI::ValidationError("kernel: --out is required");
    const int used_threads = resolve_threads(threads);
    const auto ds = load_dataset(dopt);

    const auto t0 = std::chrono::steady_clock::now();
    KernelMatrix H = make_gram(ds.images, kopt);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    H.input_checksum = dataset_checksum(ds);
    write_kernel(out, H);

    const double pairs = 0.5 * static_cast<double>(H.n) * static_cast<double>(H.n + 1);
    std::fprintf(stderr, "kernel: %zu x %zu %s gram in %.2fs (%.0f pairs/s)\n", H.n, H.n,
                 kernel_kind_name(H.kind), elapsed, pairs / std::max(elapsed, 1e-9));

    json manifest;
    manifest["subcommand"] = "kernel";
    manifest["kernel"] = kopt.kind;
    manifest["depth"] = kopt.depth;
    if (kopt.kind != "fc-ntk") manifest["filter_size"] = kopt.filter_size;
    manifest["dataset"] = dataset_manifest(ds, dopt);
    manifest["threads"] = used_threads;
    manifest["out"] = out;
    manifest["elapsed_seconds"] = elapsed;
    manifest["pairs_per_second"] = pairs / std::max(elapsed, 1e-9);
    emit_results(manifest, "");
    return 0;
}

int cmd_fit_predict(const DatasetOptions& dopt, const KernelOptions& kopt, double ridge,
                    std::size_t train_count, std::size_t test_count, const std::string& out,
                    int threads) {
    reject_filter_size_for_fc(kopt);
    if (ridge < 0) throw CLI::ValidationError("--ridge must be nonnegative");
    const int used_threads = resolve_threads(threads);
    auto ds = load_dataset(dopt);

    const std::size_t total = ds.images.size();
    std::size_t ntr = train_count > 0 ? train_count : total;
    std::size_t nte = test_count;
    if (ntr + nte > total)
        throw std::runtime_error("fit-predict: train + test exceeds dataset size");
    const bool self_test = nte == 0;

    // One Gram over train followed by test; the training block and the
    // test-vs-train rows are slices of it.
    std::vector<ImageTensor> inputs(ds.images.begin(),
                                    ds.images.begin() + static_cast<std::ptrdiff_t>(ntr + nte));
    KernelMatrix full = make_gram(inputs, kopt);

    KernelMatrix Htr(ntr, full.kind, full.depth);
    Htr.filter_size = full.filter_size;
    for (std::size_t i = 0; i < ntr; ++i)
        for (std::size_t j = 0; j < ntr; ++j) Htr.at(i, j) = full.at(i, j);

    std::vector<int> train_labels(ds.labels.begin(),
                                  ds.labels.begin() + static_cast<std::ptrdiff_t>(ntr));
    auto Y = encode_labels(train_labels, ds.k);
    auto pred = fit(Htr, Y, ds.k, ridge);

    const std::size_t eval_begin = self_test ? 0 : ntr;
    const std::size_t eval_count = self_test ? ntr : nte;
    std::vector<int> got(eval_count), want(eval_count);
    std::vector<std::size_t> per_class_hit(static_cast<std::size_t>(ds.k), 0),
        per_class_total(static_cast<std::size_t>(ds.k), 0);
    for (std::size_t t = 0; t < eval_count; ++t) {
        std::vector<double> row(ntr);
        for (std::size_t j = 0; j < ntr; ++j) row[j] = full.at(eval_begin + t, j);
        got[t] = classify(predict(pred, row));
        want[t] = ds.labels[eval_begin + t];
        per_class_total[want[t]] += 1;
        if (got[t] == want[t]) per_class_hit[want[t]] += 1;
    }
    const double acc = accuracy(got, want);

    std::printf("%-8s %-12s %8s %8s\n", "class", "", "count", "accuracy");
    for (int c = 0; c < ds.k; ++c)
        if (per_class_total[c] > 0)
            std::printf("%-8d %-12s %8zu %8.4f\n", c, "", per_class_total[c],
                        static_cast<double>(per_class_hit[c]) / per_class_total[c]);
    std::printf("overall  %-12s %8zu %8.4f\n", self_test ? "(train)" : "(held-out)", eval_count,
                acc);

    json manifest;
    manifest["subcommand"] = "fit-predict";
    manifest["kernel"] = kopt.kind;
    manifest["depth"] = kopt.depth;
    if (kopt.kind != "fc-ntk") manifest["filter_size"] = kopt.filter_size;
    manifest["ridge"] = ridge;
    manifest["train_count"] = ntr;
    manifest["test_count"] = eval_count;
    manifest["self_test"] = self_test;
    manifest["dataset"] = dataset_manifest(ds, dopt);
    manifest["threads"] = used_threads;
    manifest["accuracy"] = acc;
    emit_results(manifest, out);
    return 0;
}

int cmd_verify_ntk(int depth, std::vector<int> widths, int seeds, int dim, std::uint64_t seed,
                   double max_final, const std::string& out) {
    if (widths.empty()) widths = {64, 256, 1024, 4096};
    if (dim < 2) throw CLI::ValidationError("--dim must be at least 2");
    std::vector<double> x(static_cast<std::size_t>(dim), 0.0), xp = x;
    x[0] = 1.0;
    xp[1] = 1.0;
    const double exact = ntk_pair(x, xp, depth).theta;

    std::vector<double> medians;
    std::printf("%-8s %-14s %-14s\n", "width", "median|err|", "exact");
    for (int w : widths) {
        std::vector<double> errs;
        MlpArch arch;
        arch.widths.assign(static_cast<std::size_t>(depth) + 1, w);
        arch.widths[0] = dim;
        for (int s = 0; s < seeds; ++s) {
            const auto params =
                init_net(arch, seed_stream(seed, static_cast<std::uint64_t>(w) * 1000 + s));
            errs.push_back(std::fabs(empirical_kernel(params, x, xp) - exact));
        }
        medians.push_back(median(errs));
        std::printf("%-8d %-14.6g %-14.6g\n", w, medians.back(), exact);
    }

    bool monotone = true;
    for (std::size_t i = 1; i < medians.size(); ++i)
        monotone = monotone && medians[i] <= medians[i - 1];
    const bool final_ok = max_final <= 0.0 || medians.back() <= max_final;

    json manifest;
    manifest["subcommand"] = "verify-ntk";
    manifest["depth"] = depth;
    manifest["widths"] = widths;
    manifest["seeds"] = seeds;
    manifest["dim"] = dim;
    manifest["seed"] = seed;
    manifest["exact_theta"] = exact;
    manifest["medians"] = medians;
    manifest["monotone_nonincreasing"] = monotone;
    if (max_final > 0.0) manifest["max_final"] = max_final;
    manifest["final_ok"] = final_ok;
    emit_results(manifest, out);
    if (!monotone || !final_ok) {
        std::fprintf(stderr, "verify-ntk: convergence check failed\n");
        return 1;
    }
    return 0;
}

int cmd_verify_equivalence(int depth, int width, double kappa, double eta, int n_train,
                           int n_test, int dim, double jitter, double loss_ratio, long max_steps,
                           int seeds, std::uint64_t seed, double max_dev, const std::string& out) {
    std::vector<double> max_devs, mean_devs;
    int within = 0;
    std::printf("%-6s %-12s %-12s %-8s\n", "seed", "max|dev|", "mean|dev|", "steps");
    for (int s = 0; s < seeds; ++s) {
        GaussianRng rng(seed_stream(seed, static_cast<std::uint64_t>(s)));
        auto draw_unit = [&](int d) {
            std::vector<double> v(static_cast<std::size_t>(d));
            double norm = 0.0;
            for (auto& t : v) {
                t = rng.normal();
                norm += t * t;
            }
            norm = std::sqrt(norm);
            for (auto& t : v) t /= norm;
            return v;
        };

        std::vector<std::vector<double>> xtr, xte;
        for (int i = 0; i < n_train; ++i) xtr.push_back(draw_unit(dim));
        const auto anchor = draw_unit(dim);
        std::vector<double> y;
        for (const auto& v : xtr) {
            double dot = 0.0;
            for (int t = 0; t < dim; ++t) dot += anchor[t] * v[t];
            y.push_back(dot >= 0 ? 1.0 : -1.0);
        }
        for (int i = 0; i < n_test; ++i) {
            auto v = xtr[static_cast<std::size_t>(i) % xtr.size()];
            double norm = 0.0;
            for (auto& t : v) {
                t += jitter * rng.normal();
                norm += t * t;
            }
            norm = std::sqrt(norm);
            for (auto& t : v) t /= norm;
            xte.push_back(std::move(v));
        }

        KernelMatrix H = ntk_matrix(xtr, depth);
        auto pred = fit(H, y, 1, 0.0);
        const std::vector<double> rows = ntk_cross(xte, xtr, depth);

        TrainState state;
        MlpArch arch;
        arch.widths.assign(static_cast<std::size_t>(depth) + 1, width);
        arch.widths[0] = dim;
        state.params = init_net(arch, seed_stream(seed, 1000 + static_cast<std::uint64_t>(s)));
        state.kappa = kappa;
        state.eta = eta;
        train_full_batch(state, xtr, y, 0);
        const double target = loss_ratio * state.loss;
        train_to_loss(state, xtr, y, target, max_steps);
        if (state.loss > target)
            std::fprintf(stderr, "verify-equivalence: seed %d stopped at loss %.3g > %.3g\n", s,
                         state.loss, target);

        double worst = 0.0, mean = 0.0;
        for (int i = 0; i < n_test; ++i) {
            std::span<const double> row(rows.data() + static_cast<std::size_t>(i) * n_train,
                                        static_cast<std::size_t>(n_train));
            const double f_ntk = predict(pred, row)[0];
            const double f_nn = kappa * forward(state.params, xte[i]);
            const double dev = std::fabs(f_nn - f_ntk);
            worst = std::max(worst, dev);
            mean += dev / n_test;
        }
        max_devs.push_back(worst);
        mean_devs.push_back(mean);
        double maxy = 0.0;
        for (double v : y) maxy = std::max(maxy, std::fabs(v));
        if (max_dev <= 0.0 || worst <= max_dev * maxy) ++within;
        std::printf("%-6d %-12.5g %-12.5g %-8ld\n", s, worst, mean, state.steps);
    }

    json manifest;
    manifest["subcommand"] = "verify-equivalence";
    manifest["depth"] = depth;
    manifest["width"] = width;
    manifest["kappa"] = kappa;
    manifest["eta"] = eta;
    manifest["n_train"] = n_train;
    manifest["n_test"] = n_test;
    manifest["dim"] = dim;
    manifest["test_jitter"] = jitter;
    manifest["loss_ratio"] = loss_ratio;
    manifest["max_steps"] = max_steps;
    manifest["seeds"] = seeds;
    manifest["seed"] = seed;
    manifest["max_devs"] = max_devs;
    manifest["mean_devs"] = mean_devs;
    if (max_dev > 0.0) {
        manifest["max_dev"] = max_dev;
        manifest["seeds_within"] = within;
    }
    emit_results(manifest, out);
    if (max_dev > 0.0 && within < seeds) {
        std::fprintf(stderr, "verify-equivalence: %d of %d seeds within envelope\n", within,
                     seeds);
        return 1;
    }
    return 0;
}

int cmd_rf_compare(const DatasetOptions& dopt, const KernelOptions& kopt,
                   std::vector<int> channels, double ridge, std::size_t train_count,
                   std::size_t test_count, std::uint64_t net_seed, const std::string& out,
                   int threads) {
    if (kopt.kind == "fc-ntk")
        throw CLI::ValidationError("rf-compare: use a convolutional kernel");
    if (channels.empty()) channels = {1024};
    const int used_threads = resolve_threads(threads);
    auto ds = load_dataset(dopt);

    const std::size_t total = ds.images.size();
    std::size_t ntr = train_count > 0 ? train_count : total / 2;
    std::size_t nte = test_count > 0 ? test_count : total - ntr;
    if (ntr + nte > total) throw std::runtime_error("rf-compare: train + test exceeds dataset");
    std::vector<ImageTensor> inputs(ds.images.begin(),
                                    ds.images.begin() + static_cast<std::ptrdiff_t>(ntr + nte));

    KernelMatrix exact = make_gram(inputs, kopt);

    auto accuracy_of = [&](const KernelMatrix& full) {
        KernelMatrix Htr(ntr, full.kind, full.depth);
        for (std::size_t i = 0; i < ntr; ++i)
            for (std::size_t j = 0; j < ntr; ++j) Htr.at(i, j) = full.at(i, j);
        std::vector<int> train_labels(ds.labels.begin(),
                                      ds.labels.begin() + static_cast<std::ptrdiff_t>(ntr));
        auto pred = fit(Htr, encode_labels(train_labels, ds.k), ds.k, ridge);
        std::vector<int> got, want;
        for (std::size_t t = 0; t < nte; ++t) {
            std::vector<double> row(ntr);
            for (std::size_t j = 0; j < ntr; ++j) row[j] = full.at(ntr + t, j);
            got.push_back(classify(predict(pred, row)));
            want.push_back(ds.labels[ntr + t]);
        }
        return accuracy(got, want);
    };
    const double exact_acc = accuracy_of(exact);

    const CnnHead head = kopt.kind == "cntk-gap" ? CnnHead::GapScalar : CnnHead::Dense;
    json rows = json::array();
    std::printf("%-10s %-14s %-10s\n", "channels", "max|dev|", "accuracy");
    std::printf("%-10s %-14s %-10.4f\n", "exact", "-", exact_acc);
    std::vector<double> devs;
    for (int c : channels) {
        CnnArch arch;
        arch.P = inputs[0].P;
        arch.Q = inputs[0].Q;
        arch.channels.assign(static_cast<std::size_t>(kopt.depth) + 1, c);
        arch.channels[0] = inputs[0].C;
        arch.geom = PatchGeometry(kopt.filter_size);
        arch.head = head;
        const auto params = init_net(arch, seed_stream(net_seed, static_cast<std::uint64_t>(c)));
        KernelMatrix rf = random_feature_kernel(params, inputs);
        double dev = 0.0;
        for (std::size_t t = 0; t < rf.entries.size(); ++t)
            dev = std::max(dev, std::fabs(rf.entries[t] - exact.entries[t]));
        const double acc = accuracy_of(rf);
        devs.push_back(dev);
        std::printf("%-10d %-14.6g %-10.4f\n", c, dev, acc);
        rows.push_back({{"channels", c}, {"max_deviation", dev}, {"accuracy", acc}});
    }

    json manifest;
    manifest["subcommand"] = "rf-compare";
    manifest["kernel"] = kopt.kind;
    manifest["depth"] = kopt.depth;
    manifest["filter_size"] = kopt.filter_size;
    manifest["ridge"] = ridge;
    manifest["train_count"] = ntr;
    manifest["test_count"] = nte;
    manifest["net_seed"] = net_seed;
    manifest["dataset"] = dataset_manifest(ds, dopt);
    manifest["threads"] = used_threads;
    manifest["exact_accuracy"] = exact_acc;
    manifest["random_feature"] = rows;
    emit_results(manifest, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact NTK/CNTK kernels, finite-width verification, and kernel regression"};
    app.require_subcommand(1);

    DatasetOptions dopt;
    KernelOptions kopt;
    std::string out_path;
    int threads = 0;
    double ridge = 0.0;

    auto* kernel_cmd = app.add_subcommand("kernel", "compute a Gram matrix and write it");
    add_dataset_flags(kernel_cmd, dopt);
    add_kernel_flags(kernel_cmd, kopt);
    kernel_cmd->add_option("--out", out_path, "output kernel file");
    kernel_cmd->add_option("--threads", threads, "worker threads (0 = all)");

    std::size_t train_count = 0, test_count = 0;
    auto* fit_cmd = app.add_subcommand("fit-predict", "kernel regression accuracy");
    add_dataset_flags(fit_cmd, dopt);
    add_kernel_flags(fit_cmd, kopt);
    fit_cmd->add_option("--ridge", ridge, "ridge added to the kernel diagonal");
    fit_cmd->add_option("--train-count", train_count, "training points (0 = all)");
    fit_cmd->add_option("--test-count", test_count, "held-out points (0 = evaluate on train)");
    fit_cmd->add_option("--out", out_path, "results JSON path");
    fit_cmd->add_option("--threads", threads, "worker threads (0 = all)");

    int vn_depth = 3, vn_seeds = 20, vn_dim = 16;
    std::uint64_t vn_seed = 1;
    double vn_max_final = 0.0;
    std::vector<int> vn_widths;
    auto* vn_cmd = app.add_subcommand("verify-ntk",
                                      "finite-width kernel convergence to the exact NTK");
    vn_cmd->add_option("--depth", vn_depth)->check(CLI::PositiveNumber);
    vn_cmd->add_option("--widths", vn_widths, "hidden widths (default 64,256,1024,4096)");
    vn_cmd->add_option("--seeds", vn_seeds)->check(CLI::PositiveNumber);
    vn_cmd->add_option("--dim", vn_dim, "input dimension");
    vn_cmd->add_option("--seed", vn_seed);
    vn_cmd->add_option("--max-final", vn_max_final,
                       "also require the last median to be at most this");
    vn_cmd->add_option("--out", out_path, "results JSON path");

    int ve_depth = 2, ve_width = 2048, ve_ntrain = 8, ve_ntest = 8, ve_dim = 8, ve_seeds = 1;
    double ve_kappa = 0.05, ve_eta = 1.0, ve_jitter = 0.2, ve_loss_ratio = 1e-6,
           ve_max_dev = 0.0;
    long ve_max_steps = 20000;
    std::uint64_t ve_seed = 1;
    auto* ve_cmd = app.add_subcommand("verify-equivalence",
                                      "trained wide net vs kernel regression predictions");
    ve_cmd->add_option("--depth", ve_depth)->check(CLI::PositiveNumber);
    ve_cmd->add_option("--width", ve_width)->check(CLI::PositiveNumber);
    ve_cmd->add_option("--kappa", ve_kappa);
    ve_cmd->add_option("--eta", ve_eta);
    ve_cmd->add_option("--n-train", ve_ntrain);
    ve_cmd->add_option("--n-test", ve_ntest);
    ve_cmd->add_option("--dim", ve_dim);
    ve_cmd->add_option("--test-jitter", ve_jitter,
                       "test points are renormalized train points plus this much noise");
    ve_cmd->add_option("--loss-ratio", ve_loss_ratio, "train until loss <= ratio * initial");
    ve_cmd->add_option("--max-steps", ve_max_steps);
    ve_cmd->add_option("--seeds", ve_seeds)->check(CLI::PositiveNumber);
    ve_cmd->add_option("--seed", ve_seed);
    ve_cmd->add_option("--max-dev", ve_max_dev,
                       "assert max |f_nn - f_ntk| <= this times max|y| for every seed");
    ve_cmd->add_option("--out", out_path, "results JSON path");

    std::vector<int> rf_channels;
    std::uint64_t rf_net_seed = 7;
    auto* rf_cmd = app.add_subcommand("rf-compare",
                                      "random-feature kernels vs the exact kernel");
    add_dataset_flags(rf_cmd, dopt);
    add_kernel_flags(rf_cmd, kopt);
    rf_cmd->add_option("--channels", rf_channels, "channel counts (default 1024)");
    rf_cmd->add_option("--ridge", ridge);
    rf_cmd->add_option("--train-count", train_count, "training points (0 = half)");
    rf_cmd->add_option("--test-count", test_count, "held-out points (0 = rest)");
    rf_cmd->add_option("--net-seed", rf_net_seed, "initialization seed for the finite nets");
    rf_cmd->add_option("--out", out_path, "results JSON path");
    rf_cmd->add_option("--threads", threads, "worker threads (0 = all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(kernel_cmd))
            return cmd_kernel(dopt, kopt, out_path, threads);
        if (app.got_subcommand(fit_cmd))
            return cmd_fit_predict(dopt, kopt, ridge, train_count, test_count, out_path, threads);
        if (app.got_subcommand(vn_cmd))
            return cmd_verify_ntk(vn_depth, vn_widths, vn_seeds, vn_dim, vn_seed, vn_max_final,
                                  out_path);
        if (app.got_subcommand(ve_cmd))
            return cmd_verify_equivalence(ve_depth, ve_width, ve_kappa, ve_eta, ve_ntrain,
                                          ve_ntest, ve_dim, ve_jitter, ve_loss_ratio,
                                          ve_max_steps, ve_seeds, ve_seed, ve_max_dev, out_path);
        if (app.got_subcommand(rf_cmd))
            return cmd_rf_compare(dopt, kopt, rf_channels, ridge, train_count, test_count,
                                  rf_net_seed, out_path, threads);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
