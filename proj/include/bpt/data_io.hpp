#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpt/common.hpp"
#include "bpt/feature_pipeline.hpp"

namespace bpt {

// A dataset holds either raster images or precomputed feature vectors,
// plus optional class labels. `labels` is empty for unlabeled collections.
struct Dataset {
    std::vector<Image> images;
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int n_classes = 0;
    std::string provenance;

    bool has_images() const { return !images.empty(); }
    std::size_t size() const { return has_images() ? images.size() : features.size(); }
};

struct SplitSpec {
    int reserved_labeled = 1000;
    std::uint64_t seed = 0;
    int chunk_size = 2000;
};

// Labeled examples reserved for teacher training; ids index the source
// dataset. by_class[c] lists the pool positions holding class c.
struct LabeledPool {
    std::vector<int> ids;
    std::vector<int> labels;
    std::vector<std::vector<int>> by_class;

    std::size_t size() const { return ids.size(); }
};

// The unlabeled stream: chunked ids only. No label field exists on purpose;
// training code can never see the stream's ground truth.
struct UnlabeledStream {
    std::vector<std::vector<int>> chunks;

    std::size_t example_count() const {
        std::size_t n = 0;
        for (const auto& c : chunks) n += c.size();
        return n;
    }
};

// Ground truth of the stream examples, kept apart for evaluation and for
// synthetic-teacher experiments. labels_by_id[id] is -1 for non-stream ids.
struct EvalView {
    std::vector<int> ids;
    std::vector<int> labels_by_id;
};

struct SplitResult {
    LabeledPool pool;
    UnlabeledStream stream;
    EvalView eval;
};

enum class CifarSplit { train, test };

// CIFAR-10 binary batches: records of exactly 3073 bytes, 1 label byte
// (0-9) then 3072 channel-planar pixel bytes; pixels scaled to [0,1].
Dataset load_cifar10(const std::string& directory, CifarSplit split = CifarSplit::train);
Dataset load_cifar10_file(const std::string& path);

// CIFAR-100: records of 3074 bytes, coarse label byte (validated < 20,
// otherwise ignored), fine label byte (0-99, used), 3072 pixel bytes.
Dataset load_cifar100(const std::string& directory, CifarSplit split = CifarSplit::train);
Dataset load_cifar100_file(const std::string& path);

// Gaussian point clouds with class means on a centered simplex at pairwise
// distance `separation` and unit isotropic noise. Requires dim >= n_classes.
Dataset synth_gaussians(int n_classes, int per_class, int dim, double separation,
                        std::uint64_t seed);

// Synthetic recognition images: each class is a sinusoidal grating at its
// own orientation, with per-image random phase and contrast plus pixel
// noise. Single channel, values clamped to [0,1].
Dataset synth_images(int n_classes, int per_class, int image_size, std::uint64_t seed,
                     double noise = 0.06);

// Seeded stratified split into (reserved labeled pool, chunked unlabeled
// stream, evaluation-only truth). The pool and the stream partition the
// dataset; stream labels travel only in the EvalView.
SplitResult split(const Dataset& ds, const SplitSpec& spec);

// One row per example: label, then the feature (or flattened pixel) values.
void export_csv(const Dataset& ds, const std::string& path);

}  // namespace bpt
