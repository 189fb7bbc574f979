#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ntk/cntk.hpp"
#include "ntk/data_io.hpp"
#include "ntk/ntk_fc.hpp"

using namespace ntk;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(NTK_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    // std::system returns the wait status; extract the exit code portion.
    return (status >= 256) ? status / 256 : status;
}

int run_capture(const std::string& args, std::string& stdout_text) {
    const TempFile cap("tmp_cli_capture.txt");
    const int code = run(args + " > " + cap.path + " 2> tmp_cli_capture_err.txt");
    std::remove("tmp_cli_capture_err.txt");
    std::ifstream in(cap.path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    stdout_text = ss.str();
    return code;
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("kernel subcommand writes a gram that matches the library") {
    const TempFile out("tmp_cli_gram.bin");
    const std::string flags =
        "kernel --shape 1x1x4 --n 6 --k 2 --seed 11 --kernel cntk-vanilla --depth 2 "
        "--filter-size 1 --out " +
        out.path;
    CHECK(run(flags) == 0);

    const KernelMatrix H = read_kernel(out.path);
    CHECK(H.n == 6);
    CHECK(H.kind == KernelKind::CntkVanilla);
    CHECK(H.depth == 2);
    CHECK(H.filter_size == 1);

    // Recreate the dataset the CLI resolved and compare against a direct
    // library computation. On 1x1 images with a 1x1 filter the convolutional
    // kernel coincides with the fully-connected one, which exercises the
    // cross-module agreement through the command line path.
    const auto ds = synthetic_image_dataset(6, 1, 1, 4, 2, 11);
    CHECK(H.input_checksum == dataset_checksum(ds));
    std::vector<std::vector<double>> flat;
    for (const auto& img : ds.images) flat.push_back(flatten(img));
    const KernelMatrix F = ntk_matrix(flat, 2);
    for (std::size_t i = 0; i < H.n; ++i)
        for (std::size_t j = 0; j < H.n; ++j)
            CHECK(std::fabs(H.at(i, j) - F.at(i, j)) <= 1e-12);
}

TEST_CASE("kernel subcommand reruns byte-identically") {
    const TempFile a("tmp_cli_rerun_a.bin");
    const TempFile b("tmp_cli_rerun_b.bin");
    const std::string base =
        "kernel --shape 3x3x2 --n 5 --k 2 --seed 3 --kernel cntk-gap --depth 2 --out ";
    CHECK(run(base + a.path) == 0);
    CHECK(run(base + b.path) == 0);
    CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(run("kernel --shape 4 --kernel no-such-kernel --out tmp_cli_x.bin 2> /dev/null") == 2);
    CHECK(run("kernel --shape 4 --kernel fc-ntk 2> /dev/null") == 2);  // missing --out
    CHECK(run("kernel --shape 4 --kernel fc-ntk --filter-size 3 --out tmp_cli_x.bin "
              "2> /dev/null") == 2);
    CHECK(run("fit-predict --data no/such/path.bin 2> /dev/null") == 2);
    CHECK(run("2> /dev/null") == 2);  // missing subcommand
    CHECK(run("--help > /dev/null") == 0);
}

TEST_CASE("fit-predict interpolates its own training set") {
    std::string text;
    const int code = run_capture(
        "fit-predict --shape 6 --n 12 --k 3 --seed 5 --kernel fc-ntk --depth 2", text);
    CHECK(code == 0);
    CHECK(text.find("\"accuracy\":1.0") != std::string::npos);
    CHECK(text.find("\"self_test\":true") != std::string::npos);
}

TEST_CASE("fit-predict holds out test points and reports their count") {
    std::string text;
    const int code = run_capture(
        "fit-predict --shape 4 --n 20 --k 2 --seed 9 --kernel fc-ntk --depth 1 "
        "--train-count 14 --test-count 6 --ridge 1e-8",
        text);
    CHECK(code == 0);
    CHECK(text.find("\"test_count\":6") != std::string::npos);
    CHECK(text.find("\"self_test\":false") != std::string::npos);
}

TEST_CASE("verify-ntk reports widths and passes on a coarse run") {
    std::string text;
    const int code = run_capture(
        "verify-ntk --depth 1 --widths 32 512 --seeds 7 --dim 6 --seed 2", text);
    CHECK(code == 0);
    CHECK(text.find("\"monotone_nonincreasing\":true") != std::string::npos);
}

TEST_CASE("verify-equivalence trains a small net against the kernel predictor") {
    std::string text;
    const int code = run_capture(
        "verify-equivalence --depth 1 --width 512 --kappa 0.2 --eta 1.0 --n-train 4 "
        "--n-test 4 --dim 6 --seeds 1 --seed 4 --max-steps 4000",
        text);
    CHECK(code == 0);
    CHECK(text.find("\"max_devs\":[") != std::string::npos);
}

TEST_CASE("rf-compare reports deviations for each channel count") {
    std::string text;
    const int code = run_capture(
        "rf-compare --shape 2x2x1 --n 10 --k 2 --seed 6 --kernel cntk-gap --depth 2 "
        "--channels 8 64 --train-count 6 --test-count 4 --ridge 1e-6",
        text);
    CHECK(code == 0);
    CHECK(text.find("\"random_feature\":[") != std::string::npos);
    CHECK(text.find("\"channels\":8") != std::string::npos);
    CHECK(text.find("\"channels\":64") != std::string::npos);
    CHECK(run("rf-compare --shape 2x2x1 --n 4 --kernel fc-ntk 2> /dev/null") == 2);
}
