#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace puree {

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Small RGB raster with values in [0, 1], stored plane-major: the full R
// plane (row-major), then G, then B.
struct PatchImage {
    int height = 0;
    int width = 0;
    int channels = 3;
    std::vector<float> data;

    static PatchImage make(int h, int w, int c = 3, float fill = 0.0f) {
        if (h < 1 || w < 1 || c < 1) {
            throw ImageError("PatchImage: dimensions must be >= 1");
        }
        PatchImage img;
        img.height = h;
        img.width = w;
        img.channels = c;
        img.data.assign(static_cast<std::size_t>(h) * w * c, fill);
        return img;
    }

    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
    std::size_t size() const { return plane_size() * channels; }

    float& at(int c, int y, int x) { return data[plane_size() * c + static_cast<std::size_t>(y) * width + x]; }
    float at(int c, int y, int x) const { return data[plane_size() * c + static_cast<std::size_t>(y) * width + x]; }

    bool same_shape(const PatchImage& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

struct Rect {
    int y = 0;
    int x = 0;
    int h = 0;
    int w = 0;
};

struct PatchGridSpec {
    int window_h = 50;
    int window_w = 100;
    int stride_h = 25;
    int stride_w = 50;
};

inline float clamp01(double v) {
    return static_cast<float>(std::min(1.0, std::max(0.0, v)));
}

inline double luma_rec601(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

inline PatchImage crop(const PatchImage& img, const Rect& r) {
    if (r.h < 1 || r.w < 1 || r.y < 0 || r.x < 0 || r.y + r.h > img.height || r.x + r.w > img.width) {
        throw ImageError("crop: rectangle out of bounds");
    }
    PatchImage out = PatchImage::make(r.h, r.w, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < r.h; ++y) {
            for (int x = 0; x < r.w; ++x) {
                out.at(c, y, x) = img.at(c, r.y + y, r.x + x);
            }
        }
    }
    return out;
}

// Divides every channel by that channel's mean over the white reference
// region, then clamps back into [0, 1].
inline PatchImage white_normalize(const PatchImage& img, const Rect& white_region) {
    const Rect& r = white_region;
    if (r.h < 1 || r.w < 1 || r.y < 0 || r.x < 0 || r.y + r.h > img.height || r.x + r.w > img.width) {
        throw ImageError("white_normalize: reference region out of bounds");
    }
    std::vector<double> mean(img.channels, 0.0);
    for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int y = r.y; y < r.y + r.h; ++y) {
            for (int x = r.x; x < r.x + r.w; ++x) {
                acc += img.at(c, y, x);
            }
        }
        mean[c] = acc / (static_cast<double>(r.h) * r.w);
        if (mean[c] <= 0.0) {
            throw ImageError("white_normalize: zero-mean white region in channel " + std::to_string(c));
        }
    }
    PatchImage out = img;
    for (int c = 0; c < img.channels; ++c) {
        const double inv = 1.0 / mean[c];
        float* plane = out.data.data() + out.plane_size() * c;
        for (std::size_t i = 0; i < out.plane_size(); ++i) {
            plane[i] = clamp01(plane[i] * inv);
        }
    }
    return out;
}

// Number of window offsets along one axis: floor((extent - window) / stride) + 1.
inline int grid_count(int extent, int window, int stride) {
    return (extent - window) / stride + 1;
}

// Enumerates fully-contained windows top-to-bottom, left-to-right at offsets
// (i*stride_h, j*stride_w).
inline std::vector<PatchImage> decompose_patches(const PatchImage& img, const PatchGridSpec& grid) {
    if (grid.stride_h < 1 || grid.stride_w < 1 || grid.stride_h > grid.window_h ||
        grid.stride_w > grid.window_w) {
        throw ImageError("decompose_patches: require 1 <= stride <= window");
    }
    if (grid.window_h > img.height || grid.window_w > img.width) {
        throw ImageError("decompose_patches: window larger than image");
    }
    const int rows = grid_count(img.height, grid.window_h, grid.stride_h);
    const int cols = grid_count(img.width, grid.window_w, grid.stride_w);
    std::vector<PatchImage> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            out.push_back(crop(img, Rect{i * grid.stride_h, j * grid.stride_w, grid.window_h, grid.window_w}));
        }
    }
    return out;
}

namespace detail {

// Catmull-Rom cubic kernel (a = -0.5).
inline double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::fabs(t);
    if (t <= 1.0) {
        return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    }
    if (t < 2.0) {
        return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
    }
    return 0.0;
}

// One separable pass along x; `n_in` source samples per row become `n_out`.
// Source coordinate of output sample j is 2*j + 0.5; taps clamp to the edge.
inline void half_pass(const std::vector<double>& in, int rows, int n_in,
                      std::vector<double>& out, int n_out) {
    out.assign(static_cast<std::size_t>(rows) * n_out, 0.0);
    for (int r = 0; r < rows; ++r) {
        const double* src = in.data() + static_cast<std::size_t>(r) * n_in;
        double* dst = out.data() + static_cast<std::size_t>(r) * n_out;
        for (int j = 0; j < n_out; ++j) {
            const double center = 2.0 * j + 0.5;
            const int base = static_cast<int>(std::floor(center));
            double acc = 0.0;
            for (int k = -1; k <= 2; ++k) {
                const int idx = std::clamp(base + k, 0, n_in - 1);
                acc += cubic_weight(center - (base + k)) * src[idx];
            }
            dst[j] = acc;
        }
    }
}

}  // namespace detail

// Halves both dimensions with Catmull-Rom bicubic resampling (a = -0.5,
// clamp-to-edge). Both passes run unclamped in double; the final result is
// clamped to [0, 1].
inline PatchImage downscale_bicubic(const PatchImage& img, double factor = 0.5) {
    if (factor != 0.5) {
        throw ImageError("downscale_bicubic: only factor 0.5 is supported");
    }
    if (img.height % 2 != 0 || img.width % 2 != 0) {
        throw ImageError("downscale_bicubic: dimensions must be even for factor 0.5");
    }
    const int oh = img.height / 2;
    const int ow = img.width / 2;
    PatchImage out = PatchImage::make(oh, ow, img.channels);
    std::vector<double> plane(img.plane_size());
    std::vector<double> cols_pass, rows_pass, transposed;
    for (int c = 0; c < img.channels; ++c) {
        const float* src = img.data.data() + img.plane_size() * c;
        for (std::size_t i = 0; i < img.plane_size(); ++i) plane[i] = src[i];

        // x pass: height rows of width -> ow samples
        detail::half_pass(plane, img.height, img.width, cols_pass, ow);
        // transpose to run the y pass row-wise
        transposed.assign(static_cast<std::size_t>(ow) * img.height, 0.0);
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < ow; ++x) {
                transposed[static_cast<std::size_t>(x) * img.height + y] =
                    cols_pass[static_cast<std::size_t>(y) * ow + x];
            }
        }
        detail::half_pass(transposed, ow, img.height, rows_pass, oh);
        float* dst = out.data.data() + out.plane_size() * c;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                dst[static_cast<std::size_t>(y) * ow + x] =
                    clamp01(rows_pass[static_cast<std::size_t>(x) * oh + y]);
            }
        }
    }
    return out;
}

// Network input geometry: 25x50 RGB patches flatten to 3750 values.
inline constexpr int kNetPatchHeight = 25;
inline constexpr int kNetPatchWidth = 50;
inline constexpr int kNetInputDim = kNetPatchHeight * kNetPatchWidth * 3;

// Stacks the channel planes R, then G, then B, each row-major.
inline std::vector<float> vectorize_patch(const PatchImage& p) {
    if (p.height != kNetPatchHeight || p.width != kNetPatchWidth || p.channels != 3) {
        throw ImageError("vectorize_patch: expected a " + std::to_string(kNetPatchHeight) + "x" +
                         std::to_string(kNetPatchWidth) + "x3 patch, got " + std::to_string(p.height) +
                         "x" + std::to_string(p.width) + "x" + std::to_string(p.channels));
    }
    return p.data;
}

inline PatchImage unvectorize_patch(const std::vector<float>& v) {
    if (static_cast<int>(v.size()) != kNetInputDim) {
        throw ImageError("unvectorize_patch: expected " + std::to_string(kNetInputDim) + " values");
    }
    PatchImage p = PatchImage::make(kNetPatchHeight, kNetPatchWidth, 3);
    p.data = v;
    return p;
}

// ---------------------------------------------------------------------------
// Raw float image interchange: 16-byte header (u32 width, u32 height,
// u32 channels, u32 reserved, little-endian) followed by 32-bit floats,
// plane-major.

namespace detail {

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_f32_le(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32_le(out, bits);
}

inline float read_f32_le(std::istream& in) {
    const std::uint32_t bits = read_u32_le(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace detail

inline void save_raw_image(const std::string& path, const PatchImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ImageError("cannot write image file: " + path);
    }
    detail::write_u32_le(out, static_cast<std::uint32_t>(img.width));
    detail::write_u32_le(out, static_cast<std::uint32_t>(img.height));
    detail::write_u32_le(out, static_cast<std::uint32_t>(img.channels));
    detail::write_u32_le(out, 0u);
    for (float v : img.data) {
        detail::write_f32_le(out, v);
    }
    if (!out) {
        throw ImageError("short write: " + path);
    }
}

inline PatchImage load_raw_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageError("cannot open image file: " + path);
    }
    const std::uint32_t w = detail::read_u32_le(in);
    const std::uint32_t h = detail::read_u32_le(in);
    const std::uint32_t c = detail::read_u32_le(in);
    detail::read_u32_le(in);  // reserved
    if (!in || w < 1 || h < 1 || c < 1 || w > (1u << 20) || h > (1u << 20) || c > 16) {
        throw ImageError("bad raw image header: " + path);
    }
    PatchImage img = PatchImage::make(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (std::size_t i = 0; i < img.size(); ++i) {
        img.data[i] = detail::read_f32_le(in);
    }
    if (!in) {
        throw ImageError("truncated raw image: " + path);
    }
    return img;
}

}  // namespace puree
