#pragma once

// Independent brute-force reference implementations used to validate the
// library. These deliberately avoid sharing code paths with the headers they
// check.

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "puree/features.hpp"
#include "puree/image.hpp"

namespace oracles {

// Nearest of the 64 joint color bin centers by explicit Euclidean search.
inline std::array<long, 64> color_histogram_counts(const puree::PatchImage& p) {
    std::array<double, 4> centers{0.125, 0.375, 0.625, 0.875};
    std::array<long, 64> counts{};
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            double best = 1e30;
            int best_idx = 0;
            for (int r = 0; r < 4; ++r) {
                for (int g = 0; g < 4; ++g) {
                    for (int b = 0; b < 4; ++b) {
                        const double dr = p.at(0, y, x) - centers[r];
                        const double dg = p.at(1, y, x) - centers[g];
                        const double db = p.at(2, y, x) - centers[b];
                        const double d2 = dr * dr + dg * dg + db * db;
                        // strict < keeps the lowest index on ties, matching
                        // arg-min with ties resolved upward per channel only
                        // when the tie is exact; tests avoid exact ties.
                        if (d2 < best) {
                            best = d2;
                            best_idx = r * 16 + g * 4 + b;
                        }
                    }
                }
            }
            ++counts[best_idx];
        }
    }
    return counts;
}

struct SumDiffCounts {
    std::array<long, 511> sum{};   // index = value of I + T I
    std::array<long, 511> diff{};  // index = (I - T I) + 255
    long n = 0;
};

inline SumDiffCounts sum_diff_counts(const puree::GrayImage& g, int dy, int dx) {
    SumDiffCounts c;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const int ty = y + dy;
            const int tx = x + dx;
            if (ty < 0 || ty >= g.height || tx < 0 || tx >= g.width) continue;
            const int a = g.at(y, x);
            const int b = g.at(ty, tx);
            ++c.sum[a + b];
            ++c.diff[a - b + 255];
            ++c.n;
        }
    }
    return c;
}

// The seven texture statistics computed directly from integer counts.
inline puree::TextureFeatures texture_from_counts(const SumDiffCounts& c) {
    puree::TextureFeatures f;
    const double n = static_cast<double>(c.n);
    double mu = 0.0;
    for (int i = 0; i <= 510; ++i) mu += i * (c.sum[i] / n);
    mu /= 2.0;
    f.mean = mu;
    double s_spread = 0.0, s_energy = 0.0, s_entropy = 0.0;
    for (int i = 0; i <= 510; ++i) {
        if (c.sum[i] == 0) continue;
        const double p = c.sum[i] / n;
        s_spread += (i - 2.0 * mu) * (i - 2.0 * mu) * p;
        s_energy += p * p;
        s_entropy -= p * std::log(p);
    }
    double d_spread = 0.0, d_energy = 0.0, d_entropy = 0.0, homog = 0.0;
    for (int idx = 0; idx <= 510; ++idx) {
        if (c.diff[idx] == 0) continue;
        const double p = c.diff[idx] / n;
        const double j = idx - 255;
        d_spread += j * j * p;
        homog += p / (1.0 + j * j);
        d_energy += p * p;
        d_entropy -= p * std::log(p);
    }
    f.contrast = d_spread;
    f.homogeneity = homog;
    f.energy = s_energy * d_energy;
    f.variance = 0.5 * (s_spread + d_spread);
    f.correlation = 0.5 * (s_spread - d_spread);
    f.entropy = s_entropy + d_entropy;
    return f;
}

// Direct 16-tap Catmull-Rom evaluation at output pixel (oy, ox) for a
// half-scale downscale with clamp-to-edge, no separable passes.
inline double bicubic_direct(const puree::PatchImage& img, int c, int oy, int ox) {
    const auto kernel = [](double t) {
        const double a = -0.5;
        t = std::fabs(t);
        if (t <= 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
        if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
        return 0.0;
    };
    const double cy = 2.0 * oy + 0.5;
    const double cx = 2.0 * ox + 0.5;
    const int by = static_cast<int>(std::floor(cy));
    const int bx = static_cast<int>(std::floor(cx));
    double acc = 0.0;
    for (int ky = -1; ky <= 2; ++ky) {
        for (int kx = -1; kx <= 2; ++kx) {
            const int sy = std::clamp(by + ky, 0, img.height - 1);
            const int sx = std::clamp(bx + kx, 0, img.width - 1);
            acc += kernel(cy - (by + ky)) * kernel(cx - (bx + kx)) *
                   static_cast<double>(img.at(c, sy, sx));
        }
    }
    return std::min(1.0, std::max(0.0, acc));
}

// Scratch directory helper for tests that write files.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path() / ("puree_test_" + tag);
        std::filesystem::remove_all(base);
        std::filesystem::create_directories(base);
        path_ = base;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace oracles
