#include "bpt/feature_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "bpt/binary_io.hpp"
#include "bpt/rng.hpp"

namespace bpt {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

Image Image::blank(int width, int height, int channels, float fill) {
    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return img;
}

std::vector<std::vector<double>> extract_patches(const Image& img, int patch_size, int stride) {
    require(img.valid(), "invalid image buffer");
    require(patch_size >= 1 && stride >= 1, "patch size and stride must be >= 1");
    require(patch_size <= std::min(img.width, img.height), "patch larger than image");

    const int nx = patch_positions(img.width, patch_size, stride);
    const int ny = patch_positions(img.height, patch_size, stride);
    const int d = patch_size * patch_size * img.channels;

    std::vector<std::vector<double>> patches;
    patches.reserve(static_cast<std::size_t>(nx) * ny);
    std::vector<double> p(static_cast<std::size_t>(d));
    for (int py = 0; py < ny; ++py) {
        for (int px = 0; px < nx; ++px) {
            const int x0 = px * stride;
            const int y0 = py * stride;
            std::size_t idx = 0;
            double mean = 0.0;
            for (int c = 0; c < img.channels; ++c)
                for (int y = 0; y < patch_size; ++y)
                    for (int x = 0; x < patch_size; ++x) {
                        const double v = img.at(c, y0 + y, x0 + x);
                        p[idx++] = v;
                        mean += v;
                    }
            mean /= d;
            double var = 0.0;
            for (double& v : p) {
                v -= mean;
                var += v * v;
            }
            var /= d;
            const double scale = std::sqrt(std::max(var, 1e-8));
            for (double& v : p) v /= scale;
            patches.push_back(p);
        }
    }
    return patches;
}

Codebook kmeans_fit(const std::vector<std::vector<double>>& patches, int k, int iterations,
                    std::uint64_t seed, const PatchGeometry& geometry,
                    std::vector<double>* wcss_trace) {
    require(k >= 2, "codebook needs k >= 2");
    require(static_cast<int>(patches.size()) >= k, "too few patches for k clusters");
    require(iterations >= 1, "kmeans needs at least one iteration");
    const int d = static_cast<int>(patches.front().size());
    require(d == geometry.patch_size * geometry.patch_size * geometry.channels,
            "patch dimension does not match geometry");
    for (const auto& p : patches)
        require(static_cast<int>(p.size()) == d, "inconsistent patch dimensions");

    Codebook book;
    book.patch_size = geometry.patch_size;
    book.stride = geometry.stride;
    book.channels = geometry.channels;
    book.patch_mean.assign(static_cast<std::size_t>(d), 0.0);
    book.patch_std.assign(static_cast<std::size_t>(d), 1.0);

    const double m = static_cast<double>(patches.size());
    for (const auto& p : patches)
        for (int j = 0; j < d; ++j) book.patch_mean[static_cast<std::size_t>(j)] += p[static_cast<std::size_t>(j)];
    for (auto& v : book.patch_mean) v /= m;
    std::vector<double> var(static_cast<std::size_t>(d), 0.0);
    for (const auto& p : patches)
        for (int j = 0; j < d; ++j) {
            const double c = p[static_cast<std::size_t>(j)] - book.patch_mean[static_cast<std::size_t>(j)];
            var[static_cast<std::size_t>(j)] += c * c;
        }
    for (int j = 0; j < d; ++j)
        book.patch_std[static_cast<std::size_t>(j)] = std::sqrt(std::max(var[static_cast<std::size_t>(j)] / m, 1e-8));

    std::vector<std::vector<double>> z(patches.size(), std::vector<double>(static_cast<std::size_t>(d)));
    for (std::size_t i = 0; i < patches.size(); ++i)
        for (int j = 0; j < d; ++j)
            z[i][static_cast<std::size_t>(j)] =
                (patches[i][static_cast<std::size_t>(j)] - book.patch_mean[static_cast<std::size_t>(j)]) /
                book.patch_std[static_cast<std::size_t>(j)];

    // k-means++ seeding.
    Rng rng(seed);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(z[static_cast<std::size_t>(rng.uniform_below(z.size()))]);
    std::vector<double> best_d2(z.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            best_d2[i] = std::min(best_d2[i], sq_dist(z[i], centroids.back()));
            total += best_d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform01() * total;
            double acc = 0.0;
            pick = z.size() - 1;
            for (std::size_t i = 0; i < z.size(); ++i) {
                acc += best_d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_below(z.size());
        }
        centroids.push_back(z[pick]);
    }

    std::vector<int> assign(z.size(), -1);
    std::vector<double> dist(z.size(), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int it = 0; it < iterations; ++it) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            int best = 0;
            double best_val = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d2 = sq_dist(z[i], centroids[static_cast<std::size_t>(c)]);
                if (d2 < best_val) {
                    best_val = d2;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
            dist[i] = best_val;
            wcss += best_val;
        }
        if (wcss_trace) wcss_trace->push_back(wcss);
        if (!changed && it > 0) break;

        for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < z.size(); ++i) {
            auto& c = centroids[static_cast<std::size_t>(assign[i])];
            for (int j = 0; j < d; ++j) c[static_cast<std::size_t>(j)] += z[i][static_cast<std::size_t>(j)];
            counts[static_cast<std::size_t>(assign[i])]++;
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) continue;
            const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            for (auto& v : centroids[static_cast<std::size_t>(c)]) v *= inv;
        }
        // Re-seed empty clusters to the point currently farthest from its
        // centroid; that point's cost drops to zero, so WCSS stays monotone.
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] != 0) continue;
            std::size_t far = 0;
            double far_val = -1.0;
            for (std::size_t i = 0; i < z.size(); ++i)
                if (dist[i] > far_val) {
                    far_val = dist[i];
                    far = i;
                }
            centroids[static_cast<std::size_t>(c)] = z[far];
            dist[far] = 0.0;
        }
    }

    book.centroids = std::move(centroids);
    return book;
}

std::vector<double> encode(const Image& img, const Codebook& book) {
    require(book.k() >= 2, "codebook is empty");
    require(img.channels == book.channels, "image/codebook channel mismatch");
    require(book.patch_size <= std::min(img.width, img.height), "codebook patch larger than image");

    const int k = book.k();
    const int d = book.patch_dimension();
    const int nx = patch_positions(img.width, book.patch_size, book.stride);
    const int ny = patch_positions(img.height, book.patch_size, book.stride);
    auto patches = extract_patches(img, book.patch_size, book.stride);

    std::vector<double> out(static_cast<std::size_t>(4) * k, 0.0);
    std::vector<double> z(static_cast<std::size_t>(d));
    std::vector<double> act(static_cast<std::size_t>(k));
    const double half_off = (book.patch_size - 1) / 2.0;
    for (int py = 0; py < ny; ++py) {
        for (int px = 0; px < nx; ++px) {
            const auto& p = patches[static_cast<std::size_t>(py) * nx + px];
            for (int j = 0; j < d; ++j)
                z[static_cast<std::size_t>(j)] =
                    (p[static_cast<std::size_t>(j)] - book.patch_mean[static_cast<std::size_t>(j)]) /
                    book.patch_std[static_cast<std::size_t>(j)];
            double mean_z = 0.0;
            for (int c = 0; c < k; ++c) {
                act[static_cast<std::size_t>(c)] = std::sqrt(sq_dist(z, book.centroids[static_cast<std::size_t>(c)]));
                mean_z += act[static_cast<std::size_t>(c)];
            }
            mean_z /= k;
            const double cx = px * book.stride + half_off;
            const double cy = py * book.stride + half_off;
            const int qx = cx < img.width / 2.0 ? 0 : 1;
            const int qy = cy < img.height / 2.0 ? 0 : 1;
            const int q = qy * 2 + qx;
            for (int c = 0; c < k; ++c) {
                const double a = mean_z - act[static_cast<std::size_t>(c)];
                if (a > 0.0) out[static_cast<std::size_t>(q) * k + c] += a;
            }
        }
    }
    return out;
}

int hog_dimension(int width, int height, const HogConfig& cfg) {
    const int cells_x = width / cfg.cell_size;
    const int cells_y = height / cfg.cell_size;
    const int blocks_x = cells_x - cfg.block_size + 1;
    const int blocks_y = cells_y - cfg.block_size + 1;
    if (blocks_x < 1 || blocks_y < 1) return 0;
    return blocks_x * blocks_y * cfg.block_size * cfg.block_size * cfg.orientations;
}

std::vector<double> hog(const Image& img, const HogConfig& cfg) {
    require(img.valid(), "invalid image buffer");
    require(cfg.orientations >= 2, "hog needs at least 2 orientation bins");
    require(cfg.cell_size >= 1 && cfg.block_size >= 1, "hog cell/block sizes must be >= 1");
    const int cells_x = img.width / cfg.cell_size;
    const int cells_y = img.height / cfg.cell_size;
    const int blocks_x = cells_x - cfg.block_size + 1;
    const int blocks_y = cells_y - cfg.block_size + 1;
    require(blocks_x >= 1 && blocks_y >= 1, "image too small for one hog block");

    // Crop to whole cells, convert to grayscale in double precision.
    const int w = cells_x * cfg.cell_size;
    const int h = cells_y * cfg.cell_size;
    std::vector<double> gray(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v;
            if (img.channels == 3)
                v = 0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) + 0.114 * img.at(2, y, x);
            else
                v = img.at(0, y, x);
            gray[static_cast<std::size_t>(y) * w + x] = v;
        }
    auto at = [&](int y, int x) { return gray[static_cast<std::size_t>(y) * w + x]; };

    // Cell histograms: [-1,0,1] gradients (clamped at borders), magnitude
    // votes split linearly between the two nearest unsigned-orientation bins.
    const int nbins = cfg.orientations;
    const double bin_width = std::numbers::pi / nbins;
    std::vector<double> cells(static_cast<std::size_t>(cells_x) * cells_y * nbins, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = at(y, std::min(x + 1, w - 1)) - at(y, std::max(x - 1, 0));
            const double gy = at(std::min(y + 1, h - 1), x) - at(std::max(y - 1, 0), x);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx);
            if (angle < 0.0) angle += std::numbers::pi;
            if (angle >= std::numbers::pi) angle -= std::numbers::pi;
            const double t = angle / bin_width;
            int b0 = static_cast<int>(t);
            if (b0 >= nbins) b0 = nbins - 1;
            const double frac = t - b0;
            const int b1 = (b0 + 1) % nbins;
            const int cell = (y / cfg.cell_size) * cells_x + (x / cfg.cell_size);
            cells[static_cast<std::size_t>(cell) * nbins + b0] += mag * (1.0 - frac);
            cells[static_cast<std::size_t>(cell) * nbins + b1] += mag * frac;
        }
    }

    // Overlapping blocks (stride one cell), each L2-normalized.
    const int block_len = cfg.block_size * cfg.block_size * nbins;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(blocks_x) * blocks_y * block_len);
    std::vector<double> block(static_cast<std::size_t>(block_len));
    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            std::size_t idx = 0;
            double norm2 = 0.0;
            for (int cy = 0; cy < cfg.block_size; ++cy)
                for (int cx = 0; cx < cfg.block_size; ++cx) {
                    const int cell = (by + cy) * cells_x + (bx + cx);
                    for (int b = 0; b < nbins; ++b) {
                        const double v = cells[static_cast<std::size_t>(cell) * nbins + b];
                        block[idx++] = v;
                        norm2 += v * v;
                    }
                }
            const double inv = 1.0 / std::sqrt(norm2 + 1e-6 * 1e-6);
            for (int i = 0; i < block_len; ++i) out.push_back(block[static_cast<std::size_t>(i)] * inv);
        }
    }
    return out;
}

void save_codebook(const std::string& path, const Codebook& book) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open codebook file for writing: " + path);
    out.write("BPTC", 4);
    write_u32(out, 1u);
    write_u32(out, static_cast<std::uint32_t>(book.k()));
    write_u32(out, static_cast<std::uint32_t>(book.patch_dimension()));
    write_u32(out, static_cast<std::uint32_t>(book.patch_size));
    write_u32(out, static_cast<std::uint32_t>(book.stride));
    write_u32(out, static_cast<std::uint32_t>(book.channels));
    for (const auto& c : book.centroids)
        for (double v : c) write_f64(out, v);
    for (double v : book.patch_mean) write_f64(out, v);
    for (double v : book.patch_std) write_f64(out, v);
    if (!out) throw FormatError("failed writing codebook file: " + path);
}

Codebook load_codebook(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open codebook file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "BPTC") throw FormatError("bad codebook magic in " + path);
    if (read_u32(in) != 1u) throw FormatError("unsupported codebook version in " + path);
    const std::uint32_t k = read_u32(in);
    const std::uint32_t d = read_u32(in);
    Codebook book;
    book.patch_size = static_cast<int>(read_u32(in));
    book.stride = static_cast<int>(read_u32(in));
    book.channels = static_cast<int>(read_u32(in));
    book.centroids.assign(k, std::vector<double>(d));
    for (auto& c : book.centroids)
        for (auto& v : c) v = read_f64(in);
    book.patch_mean.resize(d);
    for (auto& v : book.patch_mean) v = read_f64(in);
    book.patch_std.resize(d);
    for (auto& v : book.patch_std) {
        v = read_f64(in);
        if (!(v > 0.0)) throw FormatError("nonpositive patch std in " + path);
    }
    return book;
}

}  // namespace bpt
