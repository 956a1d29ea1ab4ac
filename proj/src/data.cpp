#include "hv/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "hv/errors.hpp"
#include "hv/rng.hpp"

namespace hv {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw FormatError(path + ": truncated header");
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

// Split sizes for one stratification group: 70/15/15 with nearest
// rounding, remainder to test.
struct GroupSplit {
    std::size_t train, val, test;
};

GroupSplit split_counts(std::size_t g) {
    GroupSplit s{};
    s.train = (g * 70 + 50) / 100;
    s.val = (g * 15 + 50) / 100;
    if (s.train + s.val > g) s.val = g - s.train;
    s.test = g - s.train - s.val;
    return s;
}

struct RawPoint {
    double x, y;
    int label;
    bool rare;
};

Batch to_batch(const std::vector<RawPoint>& pts, const std::vector<std::size_t>& idx,
               double min_x, double max_x, double min_y, double max_y) {
    std::vector<double> features;
    features.reserve(idx.size() * 2);
    std::vector<int> labels;
    labels.reserve(idx.size());
    const double span_x = max_x > min_x ? max_x - min_x : 1.0;
    const double span_y = max_y > min_y ? max_y - min_y : 1.0;
    for (std::size_t i : idx) {
        features.push_back((pts[i].x - min_x) / span_x);
        features.push_back((pts[i].y - min_y) / span_y);
        labels.push_back(pts[i].label);
    }
    return {std::move(features), std::move(labels), 2};
}

}  // namespace

Batch load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img = open_input(images_path);
    const std::uint32_t img_magic = read_be32(img, images_path);
    if (img_magic != kImagesMagic) {
        char hex[16];
        std::snprintf(hex, sizeof hex, "0x%08x", img_magic);
        throw FormatError(images_path + ": bad magic " + hex);
    }
    const std::uint32_t count = read_be32(img, images_path);
    const std::uint32_t rows = read_be32(img, images_path);
    const std::uint32_t cols = read_be32(img, images_path);
    const std::size_t dim = std::size_t(rows) * cols;
    if (count == 0 || dim == 0) throw FormatError(images_path + ": empty tensor");

    std::vector<unsigned char> raw(count * dim);
    if (!img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw FormatError(images_path + ": truncated pixel data");

    std::ifstream lab = open_input(labels_path);
    const std::uint32_t lab_magic = read_be32(lab, labels_path);
    if (lab_magic != kLabelsMagic) {
        char hex[16];
        std::snprintf(hex, sizeof hex, "0x%08x", lab_magic);
        throw FormatError(labels_path + ": bad magic " + hex);
    }
    const std::uint32_t lab_count = read_be32(lab, labels_path);
    if (lab_count != count)
        throw MismatchError(images_path + " holds " + std::to_string(count) + " images but " +
                            labels_path + " holds " + std::to_string(lab_count) + " labels");
    std::vector<unsigned char> raw_labels(lab_count);
    if (!lab.read(reinterpret_cast<char*>(raw_labels.data()),
                  static_cast<std::streamsize>(raw_labels.size())))
        throw FormatError(labels_path + ": truncated label data");

    std::vector<double> features(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) features[i] = raw[i] / 255.0;
    std::vector<int> labels(raw_labels.begin(), raw_labels.end());
    return {std::move(features), std::move(labels), dim};
}

void write_idx(const Batch& batch, const std::string& images_path,
               const std::string& labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw IoError("cannot create " + images_path);
    write_be32(img, kImagesMagic);
    write_be32(img, static_cast<std::uint32_t>(batch.size()));
    write_be32(img, 1);
    write_be32(img, static_cast<std::uint32_t>(batch.feature_dim()));
    for (double v : batch.features()) {
        const long byte = std::lround(v * 255.0);
        img.put(static_cast<char>(std::clamp(byte, 0L, 255L)));
    }
    if (!img) throw IoError("write failed: " + images_path);

    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw IoError("cannot create " + labels_path);
    write_be32(lab, kLabelsMagic);
    write_be32(lab, static_cast<std::uint32_t>(batch.size()));
    for (int y : batch.labels()) {
        if (y < 0 || y > 255) throw FormatError("label out of byte range: " + std::to_string(y));
        lab.put(static_cast<char>(y));
    }
    if (!lab) throw IoError("write failed: " + labels_path);
}

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "blobs" || name == "gaussian_blobs") return SyntheticKind::GaussianBlobs;
    if (name == "rare" || name == "rare_subpopulation") return SyntheticKind::RareSubpopulation;
    throw ConfigError("unknown synthetic dataset kind: " + name);
}

SplitDataset gen_synthetic(SyntheticKind kind, int n_per_class, std::uint64_t seed) {
    if (n_per_class < 10) throw ConfigError("n_per_class must be >= 10");
    Rng rng(seed);

    // Cluster layout. Rare subclusters sit on the wrong side of the
    // natural majority boundary, so a model that ignores the 5% tail
    // misclassifies them wholesale.
    struct Cluster {
        double cx, cy, sigma;
        int label;
        bool rare;
        std::size_t count;
    };
    std::vector<Cluster> clusters;
    const std::size_t n = static_cast<std::size_t>(n_per_class);
    if (kind == SyntheticKind::GaussianBlobs) {
        clusters = {{+2.5, 0.0, 0.5, 0, false, n}, {-2.5, 0.0, 0.5, 1, false, n}};
    } else {
        // Rare 5% subclusters sit deep on the wrong side of the majority
        // boundary: fitting them costs the mean loss little and demands a
        // dedicated decision region, so mean-loss training tends to leave
        // them unfit within the schedule horizon.
        const std::size_t rare = (n * 5 + 50) / 100;  // 5%, nearest
        const std::size_t major = n - rare;
        clusters = {{+1.6, 0.0, 0.7, 0, false, major}, {-5.6, +4.9, 0.35, 0, true, rare},
                    {-1.6, 0.0, 0.7, 1, false, major}, {+5.6, -4.9, 0.35, 1, true, rare}};
    }

    std::vector<RawPoint> points;
    for (const auto& c : clusters) {
        for (std::size_t i = 0; i < c.count; ++i) {
            points.push_back({c.cx + c.sigma * rng.normal(), c.cy + c.sigma * rng.normal(),
                              c.label, c.rare});
        }
    }

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    for (const auto& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }

    // Stratified split per cluster keeps class balance and the rare-group
    // share stable across train/validation/test.
    std::vector<std::size_t> train_idx, val_idx, test_idx;
    std::size_t offset = 0;
    for (const auto& c : clusters) {
        std::vector<std::size_t> group(c.count);
        std::iota(group.begin(), group.end(), offset);
        offset += c.count;
        rng.shuffle(group);
        const GroupSplit s = split_counts(c.count);
        train_idx.insert(train_idx.end(), group.begin(), group.begin() + s.train);
        val_idx.insert(val_idx.end(), group.begin() + s.train, group.begin() + s.train + s.val);
        test_idx.insert(test_idx.end(), group.begin() + s.train + s.val, group.end());
    }
    rng.shuffle(train_idx);
    rng.shuffle(val_idx);
    rng.shuffle(test_idx);

    DatasetMeta meta;
    meta.name = kind == SyntheticKind::GaussianBlobs ? "gaussian_blobs" : "rare_subpopulation";
    meta.feature_dim = 2;
    meta.num_classes = 2;
    meta.normalized = true;
    return {to_batch(points, train_idx, min_x, max_x, min_y, max_y),
            to_batch(points, val_idx, min_x, max_x, min_y, max_y),
            to_batch(points, test_idx, min_x, max_x, min_y, max_y), std::move(meta)};
}

Batch subset_per_class(const Batch& batch, int n_per_class, std::uint64_t seed) {
    if (n_per_class < 1) throw ConfigError("subset size must be >= 1");
    int num_classes = 0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        num_classes = std::max(num_classes, batch.label(i) + 1);

    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < batch.size(); ++i) by_class[batch.label(i)].push_back(i);

    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (auto& cls : by_class) {
        rng.shuffle(cls);
        const std::size_t take = std::min(cls.size(), static_cast<std::size_t>(n_per_class));
        keep.insert(keep.end(), cls.begin(), cls.begin() + take);
    }
    std::sort(keep.begin(), keep.end());
    return batch.gather(keep);
}

SplitDataset load_mnist_split(const std::string& train_images, const std::string& train_labels,
                              const std::string& test_images, const std::string& test_labels,
                              int val_count) {
    Batch full_train = load_idx(train_images, train_labels);
    Batch test = load_idx(test_images, test_labels);
    if (val_count < 1 || static_cast<std::size_t>(val_count) >= full_train.size())
        throw ConfigError("validation count must be in [1, train size)");

    const std::size_t n_train = full_train.size() - static_cast<std::size_t>(val_count);
    std::vector<std::size_t> head(n_train), tail(val_count);
    std::iota(head.begin(), head.end(), 0);
    std::iota(tail.begin(), tail.end(), n_train);

    int num_classes = 0;
    for (std::size_t i = 0; i < full_train.size(); ++i)
        num_classes = std::max(num_classes, full_train.label(i) + 1);
    for (std::size_t i = 0; i < test.size(); ++i)
        num_classes = std::max(num_classes, test.label(i) + 1);

    DatasetMeta meta;
    meta.name = "mnist";
    meta.feature_dim = static_cast<int>(full_train.feature_dim());
    meta.num_classes = num_classes;
    meta.normalized = true;
    return {full_train.gather(head), full_train.gather(tail), std::move(test), std::move(meta)};
}

}  // namespace hv
