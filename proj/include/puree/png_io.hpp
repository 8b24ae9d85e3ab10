#pragma once

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "puree/image.hpp"

namespace puree {

// Reads an 8-bit PNG as RGB (palette/gray/alpha inputs are converted) and
// maps samples to [0,1] by dividing by 255.
inline PatchImage load_png(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw ImageError("load_png: " + path + ": " + png.message);
    }
    png.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw ImageError("load_png: " + path + ": " + msg);
    }
    PatchImage img = PatchImage::make(static_cast<int>(png.height), static_cast<int>(png.width), 3);
    const std::size_t n = img.plane_size();
    for (std::size_t i = 0; i < n; ++i) {
        img.data[i] = buffer[3 * i] / 255.0f;
        img.data[n + i] = buffer[3 * i + 1] / 255.0f;
        img.data[2 * n + i] = buffer[3 * i + 2] / 255.0f;
    }
    return img;
}

// Writes an 8-bit RGB PNG; values are scaled by 255 and rounded.
inline void save_png(const std::string& path, const PatchImage& img) {
    if (img.channels != 3) {
        throw ImageError("save_png: 3-channel image required");
    }
    std::vector<unsigned char> buffer(img.size());
    const std::size_t n = img.plane_size();
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            const float v = img.data[n * c + i];
            const int q = static_cast<int>(v * 255.0f + 0.5f);
            buffer[3 * i + c] = static_cast<unsigned char>(q < 0 ? 0 : (q > 255 ? 255 : q));
        }
    }
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width);
    png.height = static_cast<png_uint_32>(img.height);
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
        throw ImageError("save_png: " + path + ": " + png.message);
    }
}

}  // namespace puree
