#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpt/common.hpp"

namespace bpt {

// Channel-planar raster, unit-scaled pixel values. Plane c occupies
// pixels[c*w*h .. (c+1)*w*h), row-major within the plane.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> pixels;

    float at(int c, int y, int x) const {
        return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float& at(int c, int y, int x) {
        return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    static Image blank(int width, int height, int channels, float fill = 0.0f);
    bool valid() const {
        return width > 0 && height > 0 && (channels == 1 || channels == 3) &&
               pixels.size() == static_cast<std::size_t>(width) * height * channels;
    }
};

struct PatchGeometry {
    int patch_size = 6;
    int stride = 1;
    int channels = 1;
};

// K-means centroids in per-dimension standardized patch space, together with
// the statistics needed to put query patches into that space.
struct Codebook {
    std::vector<std::vector<double>> centroids;  // K x d
    std::vector<double> patch_mean;              // d
    std::vector<double> patch_std;               // d, entries > 0
    int patch_size = 6;
    int stride = 1;
    int channels = 1;

    int k() const { return static_cast<int>(centroids.size()); }
    int patch_dimension() const { return static_cast<int>(patch_mean.size()); }
};

struct HogConfig {
    int cell_size = 8;
    int orientations = 9;
    int block_size = 2;
};

// All patches at stride offsets, each normalized to mean 0 / unit variance
// with a 1e-8 variance floor. Patch layout mirrors the image layout
// (channel-planar, row-major).
std::vector<std::vector<double>> extract_patches(const Image& img, int patch_size, int stride);

// Number of patch offsets along one axis of length `side`.
inline int patch_positions(int side, int patch_size, int stride) {
    return (side - patch_size) / stride + 1;
}

// Lloyd's algorithm over standardized patches with k-means++ seeding; empty
// clusters are re-seeded to the point farthest from its current centroid.
// `wcss_trace`, when given, receives the within-cluster sum of squares after
// every assignment step (monotone nonincreasing).
Codebook kmeans_fit(const std::vector<std::vector<double>>& patches, int k, int iterations,
                    std::uint64_t seed, const PatchGeometry& geometry,
                    std::vector<double>* wcss_trace = nullptr);

// Soft-threshold ("triangle") encoding pooled over image quadrants:
// f_k = max(0, mean_j z_j - z_k) per patch, summed by quadrant of the patch
// center. Output length is exactly 4K.
std::vector<double> encode(const Image& img, const Codebook& book);

// Histogram of oriented gradients: [-1,0,1] gradients on the grayscale
// image, unsigned orientation bins with linear interpolation, L2-normalized
// overlapping blocks, concatenated.
std::vector<double> hog(const Image& img, const HogConfig& cfg);

int hog_dimension(int width, int height, const HogConfig& cfg);

// Codebook container: magic "BPTC", u32 version, dims, then row-major
// centroid/statistics payload, little-endian f64.
void save_codebook(const std::string& path, const Codebook& book);
Codebook load_codebook(const std::string& path);

}  // namespace bpt
