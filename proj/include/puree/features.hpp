#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "puree/image.hpp"

namespace puree {

class FeatureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Quantized color histogram: 4 bins per channel, 64 joint bins, normalized by
// pixel count. Bin centers are uniformly spaced at {0.125, 0.375, 0.625,
// 0.875}; each pixel goes to the nearest joint center, which factorizes into
// a per-channel nearest-center choice. Index layout is r*16 + g*4 + b.

struct ColorHistogram64 {
    std::array<double, 64> bins{};
};

namespace detail {

inline int quantize4(float v) {
    const int q = static_cast<int>(v * 4.0f);
    return q < 0 ? 0 : (q > 3 ? 3 : q);
}

}  // namespace detail

inline ColorHistogram64 color_histogram64(const PatchImage& p) {
    if (p.channels != 3 || p.plane_size() == 0) {
        throw FeatureError("color_histogram64: nonempty 3-channel patch required");
    }
    ColorHistogram64 h;
    const std::size_t n = p.plane_size();
    const float* r = p.data.data();
    const float* g = r + n;
    const float* b = g + n;
    for (std::size_t i = 0; i < n; ++i) {
        const int idx = detail::quantize4(r[i]) * 16 + detail::quantize4(g[i]) * 4 + detail::quantize4(b[i]);
        h.bins[idx] += 1.0;
    }
    for (double& v : h.bins) v /= static_cast<double>(n);
    return h;
}

// ---------------------------------------------------------------------------
// Grayscale conversion: Rec.601 luma rounded to the nearest integer in 0..255.

struct GrayImage {
    int height = 0;
    int width = 0;
    std::vector<int> v;  // 0..255

    int at(int y, int x) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

inline GrayImage to_gray_rec601(const PatchImage& p) {
    if (p.channels != 3) {
        throw FeatureError("to_gray_rec601: 3-channel patch required");
    }
    GrayImage g;
    g.height = p.height;
    g.width = p.width;
    g.v.resize(p.plane_size());
    const std::size_t n = p.plane_size();
    const float* pr = p.data.data();
    const float* pg = pr + n;
    const float* pb = pg + n;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = luma_rec601(pr[i], pg[i], pb[i]) * 255.0;
        int q = static_cast<int>(std::lround(y));
        g.v[i] = q < 0 ? 0 : (q > 255 ? 255 : q);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Translational sum/difference histograms and the seven texture features
// derived from them. Sums live in 0..510 and differences in -255..255; both
// histograms have 511 bins and are normalized over the valid overlap region.

struct SumDiffHistograms {
    std::array<double, 511> h_s{};  // index = sum value
    std::array<double, 511> h_d{};  // index = difference + 255
    int dy = 0;
    int dx = 0;
};

struct TextureFeatures {
    double mean = 0.0;
    double contrast = 0.0;
    double homogeneity = 0.0;
    double energy = 0.0;
    double variance = 0.0;
    double correlation = 0.0;
    double entropy = 0.0;
};

inline TextureFeatures texture_features_from(const SumDiffHistograms& h) {
    TextureFeatures f;
    double mu = 0.0;
    for (int i = 0; i <= 510; ++i) mu += i * h.h_s[i];
    mu *= 0.5;
    f.mean = mu;

    double sum_spread = 0.0;   // sum_i (i - 2*mu)^2 h_s(i)
    double energy_s = 0.0;
    double entropy_acc = 0.0;
    for (int i = 0; i <= 510; ++i) {
        const double p = h.h_s[i];
        if (p > 0.0) {
            const double di = i - 2.0 * mu;
            sum_spread += di * di * p;
            energy_s += p * p;
            entropy_acc -= p * std::log(p);
        }
    }
    double diff_spread = 0.0;  // sum_j j^2 h_d(j)
    double homogeneity = 0.0;
    double energy_d = 0.0;
    for (int idx = 0; idx <= 510; ++idx) {
        const double p = h.h_d[idx];
        if (p > 0.0) {
            const double j = idx - 255;
            diff_spread += j * j * p;
            homogeneity += p / (1.0 + j * j);
            energy_d += p * p;
            entropy_acc -= p * std::log(p);
        }
    }
    f.contrast = diff_spread;
    f.homogeneity = homogeneity;
    f.energy = energy_s * energy_d;
    f.variance = 0.5 * (sum_spread + diff_spread);
    f.correlation = 0.5 * (sum_spread - diff_spread);
    f.entropy = entropy_acc;
    return f;
}

// Maps and histograms over the overlap of the image with its copy translated
// by (dy, dx): s = I(y,x) + I(y+dy, x+dx), d = I(y,x) - I(y+dy, x+dx).
inline std::pair<SumDiffHistograms, TextureFeatures> sum_diff_texture(const GrayImage& g,
                                                                      int dy, int dx) {
    SumDiffHistograms h;
    h.dy = dy;
    h.dx = dx;
    const int y_lo = std::max(0, -dy), y_hi = g.height - 1 - std::max(0, dy);
    const int x_lo = std::max(0, -dx), x_hi = g.width - 1 - std::max(0, dx);
    const long count = static_cast<long>(std::max(0, y_hi - y_lo + 1)) * std::max(0, x_hi - x_lo + 1);
    if (count <= 0) {
        throw FeatureError("sum_diff_texture: empty overlap for displacement (" +
                           std::to_string(dy) + "," + std::to_string(dx) + ")");
    }
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const int a = g.at(y, x);
            const int b = g.at(y + dy, x + dx);
            h.h_s[a + b] += 1.0;
            h.h_d[a - b + 255] += 1.0;
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (double& v : h.h_s) v *= inv;
    for (double& v : h.h_d) v *= inv;
    return {h, texture_features_from(h)};
}

// ---------------------------------------------------------------------------
// Per-pixel Shannon entropy (log2, 256 intensity bins) over 9x9 neighborhoods
// clipped at the image borders.

inline constexpr int kEntropyRadius = 4;  // 9x9 window

struct EntropyMap {
    int height = 0;
    int width = 0;
    std::vector<double> v;

    double at(int y, int x) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

struct LocalEntropySummary {
    EntropyMap map;
    double mean = 0.0;
    double sd = 0.0;
};

inline LocalEntropySummary local_entropy_summary(const GrayImage& g) {
    if (g.height < 1 || g.width < 1) {
        throw FeatureError("local_entropy_summary: empty image");
    }
    LocalEntropySummary out;
    out.map.height = g.height;
    out.map.width = g.width;
    out.map.v.resize(g.v.size());
    std::array<int, 256> hist{};
    const double inv_log2 = 1.0 / std::log(2.0);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            hist.fill(0);
            const int y0 = std::max(0, y - kEntropyRadius), y1 = std::min(g.height - 1, y + kEntropyRadius);
            const int x0 = std::max(0, x - kEntropyRadius), x1 = std::min(g.width - 1, x + kEntropyRadius);
            const int n = (y1 - y0 + 1) * (x1 - x0 + 1);
            for (int yy = y0; yy <= y1; ++yy) {
                for (int xx = x0; xx <= x1; ++xx) {
                    ++hist[g.at(yy, xx)];
                }
            }
            double ent = 0.0;
            for (int c : hist) {
                if (c > 0) {
                    const double p = static_cast<double>(c) / n;
                    ent -= p * std::log(p);
                }
            }
            out.map.v[static_cast<std::size_t>(y) * g.width + x] = ent * inv_log2;
        }
    }
    double mean = 0.0;
    for (double e : out.map.v) mean += e;
    mean /= static_cast<double>(out.map.v.size());
    double var = 0.0;
    for (double e : out.map.v) var += (e - mean) * (e - mean);
    var /= static_cast<double>(out.map.v.size());
    out.mean = mean;
    out.sd = std::sqrt(var);
    return out;
}

// ---------------------------------------------------------------------------

// Mean Rec.601 luma over the patch; 1 is fully saturated white.
inline double luma_brightness(const PatchImage& p) {
    if (p.channels != 3 || p.plane_size() == 0) {
        throw FeatureError("luma_brightness: nonempty 3-channel patch required");
    }
    const std::size_t n = p.plane_size();
    const float* r = p.data.data();
    const float* g = r + n;
    const float* b = g + n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += luma_rec601(r[i], g[i], b[i]);
    }
    return acc / static_cast<double>(n);
}

// The displacements the texture features are averaged over.
inline constexpr std::array<std::pair<int, int>, 2> kTextureDisplacements{{{0, 1}, {1, 0}}};

// 71 handcrafted features: 64 color histogram bins followed by the 7 texture
// features averaged over the horizontal and vertical unit displacements.
inline std::vector<double> handcrafted_features(const PatchImage& p) {
    const ColorHistogram64 h = color_histogram64(p);
    std::vector<double> out(h.bins.begin(), h.bins.end());

    const GrayImage g = to_gray_rec601(p);
    TextureFeatures avg;
    for (const auto& [dy, dx] : kTextureDisplacements) {
        const TextureFeatures f = sum_diff_texture(g, dy, dx).second;
        avg.mean += f.mean;
        avg.contrast += f.contrast;
        avg.homogeneity += f.homogeneity;
        avg.energy += f.energy;
        avg.variance += f.variance;
        avg.correlation += f.correlation;
        avg.entropy += f.entropy;
    }
    const double k = 1.0 / static_cast<double>(kTextureDisplacements.size());
    out.push_back(avg.mean * k);
    out.push_back(avg.contrast * k);
    out.push_back(avg.homogeneity * k);
    out.push_back(avg.energy * k);
    out.push_back(avg.variance * k);
    out.push_back(avg.correlation * k);
    out.push_back(avg.entropy * k);
    return out;
}

inline constexpr int kHandcraftedDim = 71;

// Channel means/sds, luma brightness, and the local-entropy summary used in
// the descriptive report.
struct DescriptiveStats {
    double mean_r = 0.0, sd_r = 0.0;
    double mean_g = 0.0, sd_g = 0.0;
    double mean_b = 0.0, sd_b = 0.0;
    double luma = 0.0;
    double entropy_mean = 0.0;
    double entropy_sd = 0.0;
};

inline DescriptiveStats descriptive_stats(const PatchImage& p) {
    if (p.channels != 3 || p.plane_size() == 0) {
        throw FeatureError("descriptive_stats: nonempty 3-channel patch required");
    }
    DescriptiveStats s;
    const std::size_t n = p.plane_size();
    double* means[3] = {&s.mean_r, &s.mean_g, &s.mean_b};
    double* sds[3] = {&s.sd_r, &s.sd_g, &s.sd_b};
    for (int c = 0; c < 3; ++c) {
        const float* plane = p.data.data() + n * c;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += plane[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (plane[i] - mean) * (plane[i] - mean);
        var /= static_cast<double>(n);
        *means[c] = mean;
        *sds[c] = std::sqrt(var);
    }
    s.luma = luma_brightness(p);
    const LocalEntropySummary e = local_entropy_summary(to_gray_rec601(p));
    s.entropy_mean = e.mean;
    s.entropy_sd = e.sd;
    return s;
}

}  // namespace puree
