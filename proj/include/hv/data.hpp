#ifndef HV_DATA_HPP
#define HV_DATA_HPP

#include <cstdint>
#include <string>

#include "hv/models.hpp"

namespace hv {

struct DatasetMeta {
    std::string name;
    int feature_dim = 0;
    int num_classes = 0;
    bool normalized = false;  // features in [0, 1]
};

// Disjoint train/validation/test splits with shared metadata.
struct SplitDataset {
    Batch train;
    Batch validation;
    Batch test;
    DatasetMeta meta;
};

// Reads a big-endian IDX image/label file pair (magic 0x00000803 for
// rank-3 unsigned-byte images, 0x00000801 for rank-1 labels). Pixels are
// scaled to [0, 1]. Throws FormatError on bad magic or truncation,
// MismatchError when the two files disagree on the record count.
Batch load_idx(const std::string& images_path, const std::string& labels_path);

// Writes a batch back out as an IDX pair (images as count x 1 x dim,
// values rounded to bytes). Inverse of load_idx for byte-valued features.
void write_idx(const Batch& batch, const std::string& images_path,
               const std::string& labels_path);

enum class SyntheticKind {
    GaussianBlobs,       // two well-separated clusters; sanity fixture
    RareSubpopulation,   // majority cluster per class plus a 5% displaced
                         // subcluster that mean-loss training underfits
};

SyntheticKind synthetic_kind_from_name(const std::string& name);

// Deterministic synthetic dataset with a stratified 70/15/15 split.
// Features are min-max normalized to [0, 1].
SplitDataset gen_synthetic(SyntheticKind kind, int n_per_class, std::uint64_t seed);

// Keeps the first n samples of every class after a seeded shuffle.
Batch subset_per_class(const Batch& batch, int n_per_class, std::uint64_t seed);

// Assembles the conventional MNIST split: the last `val_count` images of
// the training file become the validation set.
SplitDataset load_mnist_split(const std::string& train_images, const std::string& train_labels,
                              const std::string& test_images, const std::string& test_labels,
                              int val_count = 10000);

}  // namespace hv

#endif  // HV_DATA_HPP
