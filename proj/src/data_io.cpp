#include "ntk/data_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ntk/rng.hpp"

namespace ntk {

namespace {

constexpr std::uint32_t kKernelFormatVersion = 1;
constexpr char kMagic[4] = {'C', 'N', 'T', 'K'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

class ByteReader {
public:
    ByteReader(const unsigned char* data, std::size_t len) : data_(data), len_(len) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(u64_n(4)); }
    std::uint64_t u64() { return u64_n(8); }
    unsigned char u8() { return static_cast<unsigned char>(u64_n(1)); }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    const unsigned char* span(std::size_t n) {
        need(n);
        const unsigned char* p = data_ + pos_;
        pos_ += n;
        return p;
    }

    std::size_t remaining() const { return len_ - pos_; }

private:
    void need(std::size_t n) const {
        if (len_ - pos_ < n) throw std::runtime_error("kernel file: truncated");
    }
    std::uint64_t u64_n(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int b = 0; b < bytes; ++b)
            v |= static_cast<std::uint64_t>(data_[pos_ + b]) << (8 * b);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }

    const unsigned char* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

std::uint64_t parse_hex64(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

LabeledDataset scaled_copy_structure(const LabeledDataset& ds) {
    LabeledDataset out;
    out.labels = ds.labels;
    out.k = ds.k;
    out.provenance = ds.provenance;
    return out;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t dataset_checksum(const LabeledDataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& img : ds.images) {
        const int dims[3] = {img.P, img.Q, img.C};
        h = fnv1a64(dims, sizeof(dims), h);
        h = fnv1a64(img.data.data(), img.data.size() * sizeof(double), h);
    }
    h = fnv1a64(ds.labels.data(), ds.labels.size() * sizeof(int), h);
    h = fnv1a64(&ds.k, sizeof(ds.k), h);
    return h;
}

LabeledDataset read_cifar10_bin(const std::string& path, std::size_t limit, bool normalize) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_cifar10_bin: cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    constexpr std::uint64_t kRecord = 3073;
    if (size % kRecord != 0)
        throw std::runtime_error("read_cifar10_bin: file length is not a multiple of 3073");

    std::size_t count = static_cast<std::size_t>(size / kRecord);
    if (limit > 0) count = std::min(count, limit);

    LabeledDataset ds;
    ds.k = 10;
    ds.images.reserve(count);
    ds.labels.reserve(count);
    std::vector<unsigned char> rec(kRecord);
    for (std::size_t r = 0; r < count; ++r) {
        in.read(reinterpret_cast<char*>(rec.data()), static_cast<std::streamsize>(kRecord));
        if (!in) throw std::runtime_error("read_cifar10_bin: short read");
        if (rec[0] >= 10)
            throw std::runtime_error("read_cifar10_bin: label byte out of range");
        ds.labels.push_back(rec[0]);
        ImageTensor img(32, 32, 3);
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 32; ++i)
                for (int j = 0; j < 32; ++j)
                    img.at(i, j, c) = rec[1 + (c * 32 + i) * 32 + j] / 255.0;
        ds.images.push_back(std::move(img));
    }
    std::ostringstream prov;
    prov << "cifar10:" << path << ":records=" << count << ":normalize=" << (normalize ? 1 : 0);
    ds.provenance = prov.str();
    return normalize ? unit_normalize(ds) : ds;
}

LabeledDataset downsample(const LabeledDataset& ds, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample: factor must be positive");
    LabeledDataset out = scaled_copy_structure(ds);
    out.provenance += ":downsample=" + std::to_string(factor);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (const auto& img : ds.images) {
        if (img.P % factor != 0 || img.Q % factor != 0)
            throw std::invalid_argument("downsample: factor must divide both image dimensions");
        ImageTensor small(img.P / factor, img.Q / factor, img.C);
        for (int i = 0; i < small.P; ++i)
            for (int j = 0; j < small.Q; ++j)
                for (int c = 0; c < img.C; ++c) {
                    double acc = 0.0;
                    for (int a = 0; a < factor; ++a)
                        for (int b = 0; b < factor; ++b)
                            acc += img.at(i * factor + a, j * factor + b, c);
                    small.at(i, j, c) = acc * inv;
                }
        out.images.push_back(std::move(small));
    }
    return out;
}

LabeledDataset unit_normalize(const LabeledDataset& ds) {
    LabeledDataset out = scaled_copy_structure(ds);
    for (const auto& img : ds.images) {
        ImageTensor scaled = img;
        double norm = 0.0;
        for (double v : scaled.data) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& v : scaled.data) v /= norm;
        out.images.push_back(std::move(scaled));
    }
    return out;
}

namespace {

LabeledDataset synthetic_impl(std::size_t n, int P, int Q, int C, int k, std::uint64_t seed,
                              const char* tag) {
    if (n == 0 || k < 1) throw std::invalid_argument("synthetic dataset: need n >= 1, k >= 1");
    const int dim = P * Q * C;
    GaussianRng anchors_rng(seed_stream(seed, 1));
    std::vector<std::vector<double>> anchors(static_cast<std::size_t>(k));
    for (auto& a : anchors) {
        a.resize(static_cast<std::size_t>(dim));
        for (double& v : a) v = anchors_rng.normal();
    }

    GaussianRng rng(seed_stream(seed, 0));
    LabeledDataset ds;
    ds.k = k;
    std::ostringstream prov;
    prov << tag << ":n=" << n << ":shape=" << P << "x" << Q << "x" << C << ":k=" << k
         << ":seed=" << seed;
    ds.provenance = prov.str();
    for (std::size_t i = 0; i < n; ++i) {
        ImageTensor img(P, Q, C);
        double norm = 0.0;
        for (double& v : img.data) {
            v = rng.normal();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (double& v : img.data) v /= norm;
        int best = 0;
        double best_score = 0.0;
        for (int c = 0; c < k; ++c) {
            double score = 0.0;
            for (int t = 0; t < dim; ++t) score += anchors[c][t] * img.data[t];
            if (c == 0 || score > best_score) {
                best = c;
                best_score = score;
            }
        }
        ds.images.push_back(std::move(img));
        ds.labels.push_back(best);
    }
    return ds;
}

}  // namespace

LabeledDataset synthetic_sphere_dataset(std::size_t n, int dim, int k, std::uint64_t seed) {
    return synthetic_impl(n, 1, 1, dim, k, seed, "sphere");
}

LabeledDataset synthetic_image_dataset(std::size_t n, int P, int Q, int C, int k,
                                       std::uint64_t seed) {
    return synthetic_impl(n, P, Q, C, k, seed, "image");
}

std::vector<double> flatten(const ImageTensor& x) { return x.data; }

void write_kernel(const std::string& path, const KernelMatrix& H) {
    std::vector<unsigned char> out;
    out.reserve(64 + H.entries.size() * sizeof(double));
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kKernelFormatVersion);
    put_u64(out, H.n);
    out.push_back(static_cast<unsigned char>(H.kind));
    put_u32(out, static_cast<std::uint32_t>(H.depth));

    const std::size_t payload_start = out.size();
    for (double e : H.entries) put_f64(out, e);
    const std::uint64_t payload_sum =
        fnv1a64(out.data() + payload_start, out.size() - payload_start);

    nlohmann::json meta;
    meta["filter_size"] = H.filter_size;
    meta["input_checksum"] = hex64(H.input_checksum);
    meta["payload_checksum"] = hex64(payload_sum);
    meta["has_lambda0"] = H.has_lambda0;
    if (H.has_lambda0) meta["lambda0"] = H.lambda0;
    meta["kind"] = kernel_kind_name(H.kind);
    const std::string doc = meta.dump();
    put_u32(out, static_cast<std::uint32_t>(doc.size()));
    out.insert(out.end(), doc.begin(), doc.end());

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_kernel: cannot open " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write_kernel: write failed for " + path);
}

KernelMatrix read_kernel(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_kernel: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    ByteReader r(bytes.data(), bytes.size());

    const unsigned char* magic = r.span(4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_kernel: bad magic bytes");
    const std::uint32_t version = r.u32();
    if (version != kKernelFormatVersion)
        throw std::runtime_error("read_kernel: unsupported format version " +
                                 std::to_string(version));
    const std::uint64_t n = r.u64();
    const unsigned char kind_byte = r.u8();
    if (kind_byte > static_cast<unsigned char>(KernelKind::RandomFeature))
        throw std::runtime_error("read_kernel: unknown kernel kind tag");
    const std::uint32_t depth = r.u32();

    KernelMatrix H(static_cast<std::size_t>(n), static_cast<KernelKind>(kind_byte),
                   static_cast<int>(depth));
    const std::size_t payload_bytes = H.entries.size() * sizeof(double);
    const unsigned char* payload = r.span(payload_bytes);
    const std::uint64_t payload_sum = fnv1a64(payload, payload_bytes);
    {
        ByteReader pr(payload, payload_bytes);
        for (double& e : H.entries) e = pr.f64();
    }

    const std::uint32_t meta_len = r.u32();
    const unsigned char* meta_bytes = r.span(meta_len);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_bytes, meta_bytes + meta_len);
    } catch (const nlohmann::json::parse_error&) {
        throw std::runtime_error("read_kernel: malformed metadata document");
    }
    if (meta.contains("payload_checksum") &&
        parse_hex64(meta["payload_checksum"].get<std::string>()) != payload_sum)
        throw std::runtime_error("read_kernel: payload checksum mismatch");
    if (meta.contains("filter_size")) H.filter_size = meta["filter_size"].get<int>();
    if (meta.contains("input_checksum"))
        H.input_checksum = parse_hex64(meta["input_checksum"].get<std::string>());
    if (meta.contains("has_lambda0")) H.has_lambda0 = meta["has_lambda0"].get<bool>();
    if (H.has_lambda0 && meta.contains("lambda0")) H.lambda0 = meta["lambda0"].get<double>();
    return H;
}

}  // namespace ntk
