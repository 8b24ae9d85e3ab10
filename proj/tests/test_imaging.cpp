#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "puree/image.hpp"
#include "puree/png_io.hpp"
#include "puree/rng.hpp"

using puree::PatchGridSpec;
using puree::PatchImage;
using puree::Rect;

namespace {

PatchImage ramp_image(int h, int w) {
    PatchImage img = PatchImage::make(h, w, 3);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                img.at(c, y, x) = static_cast<float>((x + y * w + c) % 256) / 255.0f;
            }
        }
    }
    return img;
}

}  // namespace

TEST_CASE("white normalize identity and hand values") {
    PatchImage img = PatchImage::make(4, 4, 3, 0.25f);
    // white region rows 0..1, all channels 1.0
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < 2; ++y) {
            for (int x = 0; x < 4; ++x) img.at(c, y, x) = 1.0f;
        }
    }
    const Rect white{0, 0, 2, 4};

    SECTION("unit white mean leaves the image unchanged") {
        const PatchImage out = puree::white_normalize(img, white);
        REQUIRE(out.data == img.data);
    }
    SECTION("half-intensity white doubles values and clamps") {
        PatchImage half = img;
        for (int c = 0; c < 3; ++c) {
            for (int y = 0; y < 2; ++y) {
                for (int x = 0; x < 4; ++x) half.at(c, y, x) = 0.5f;
            }
        }
        half.at(0, 3, 0) = 0.8f;
        const PatchImage out = puree::white_normalize(half, white);
        REQUIRE(out.at(0, 2, 0) == Catch::Approx(0.5));  // 0.25 / 0.5
        REQUIRE(out.at(0, 3, 0) == 1.0f);                // 0.8 / 0.5 clamped
    }
    SECTION("second application after a uniform white is the identity") {
        const PatchImage once = puree::white_normalize(img, white);
        const PatchImage twice = puree::white_normalize(once, white);
        REQUIRE(once.data == twice.data);
    }
}

TEST_CASE("white normalize failure modes") {
    PatchImage img = PatchImage::make(4, 4, 3, 0.0f);
    REQUIRE_THROWS_AS(puree::white_normalize(img, Rect{0, 0, 2, 2}), puree::ImageError);
    img.at(0, 0, 0) = 0.5f;
    REQUIRE_THROWS_AS(puree::white_normalize(img, Rect{0, 0, 8, 8}), puree::ImageError);
    REQUIRE_THROWS_AS(puree::white_normalize(img, Rect{0, 0, 0, 2}), puree::ImageError);
}

TEST_CASE("patch decomposition counts and order") {
    SECTION("window equal to the image yields one patch") {
        const PatchImage img = ramp_image(6, 9);
        const auto patches = puree::decompose_patches(img, PatchGridSpec{6, 9, 6, 9});
        REQUIRE(patches.size() == 1);
        REQUIRE(patches[0].data == img.data);
    }
    SECTION("4x4 image, 2x2 window, stride 1 gives 9 patches") {
        const PatchImage img = ramp_image(4, 4);
        const auto patches = puree::decompose_patches(img, PatchGridSpec{2, 2, 1, 1});
        REQUIRE(patches.size() == 9);
        // patch k sits at offset (k/3, k%3)
        for (int k = 0; k < 9; ++k) {
            REQUIRE(patches[k].at(0, 0, 0) == img.at(0, k / 3, k % 3));
        }
    }
    SECTION("100x200 subimage with half-overlapping 50x100 windows gives 9 patches") {
        const PatchImage img = ramp_image(100, 200);
        const auto patches = puree::decompose_patches(img, PatchGridSpec{50, 100, 25, 50});
        REQUIRE(patches.size() == 9);
        REQUIRE(patches[0].height == 50);
        REQUIRE(patches[0].width == 100);
    }
    SECTION("window larger than the image is an error") {
        const PatchImage img = ramp_image(4, 4);
        REQUIRE_THROWS_AS(puree::decompose_patches(img, PatchGridSpec{5, 4, 1, 1}),
                          puree::ImageError);
    }
    SECTION("stride larger than window is an error") {
        const PatchImage img = ramp_image(8, 8);
        REQUIRE_THROWS_AS(puree::decompose_patches(img, PatchGridSpec{2, 2, 3, 1}),
                          puree::ImageError);
    }
}

TEST_CASE("patch count matches brute-force enumeration", "[property]") {
    puree::Rng rng(20240811);
    for (int trial = 0; trial < 200; ++trial) {
        const int h = 1 + static_cast<int>(rng.index(16));
        const int w = 1 + static_cast<int>(rng.index(16));
        const int wh = 1 + static_cast<int>(rng.index(h));
        const int ww = 1 + static_cast<int>(rng.index(w));
        const int sh = 1 + static_cast<int>(rng.index(wh));
        const int sw = 1 + static_cast<int>(rng.index(ww));
        long brute = 0;
        for (int y = 0; y + wh <= h; y += sh) {
            for (int x = 0; x + ww <= w; x += sw) ++brute;
        }
        const PatchImage img = PatchImage::make(h, w, 1, 0.5f);
        const auto patches = puree::decompose_patches(img, PatchGridSpec{wh, ww, sh, sw});
        REQUIRE(static_cast<long>(patches.size()) == brute);
        REQUIRE(static_cast<long>(patches.size()) ==
                static_cast<long>(puree::grid_count(h, wh, sh)) * puree::grid_count(w, ww, sw));
    }
}

TEST_CASE("bicubic downscale of a constant image is exactly constant") {
    const float c = 0.3137f;
    const PatchImage img = PatchImage::make(10, 14, 3, c);
    const PatchImage out = puree::downscale_bicubic(img);
    REQUIRE(out.height == 5);
    REQUIRE(out.width == 7);
    for (float v : out.data) REQUIRE(v == c);
}

TEST_CASE("bicubic downscale geometry and errors") {
    const PatchImage img = ramp_image(50, 100);
    const PatchImage out = puree::downscale_bicubic(img);
    REQUIRE(out.height == 25);
    REQUIRE(out.width == 50);
    REQUIRE_THROWS_AS(puree::downscale_bicubic(ramp_image(7, 10)), puree::ImageError);
    REQUIRE_THROWS_AS(puree::downscale_bicubic(ramp_image(10, 7)), puree::ImageError);
    REQUIRE_THROWS_AS(puree::downscale_bicubic(img, 0.25), puree::ImageError);
}

TEST_CASE("bicubic downscale matches the direct kernel-sum oracle") {
    SECTION("1-D ramp") {
        // two identical ramp rows [0, 1/7, ..., 1]
        PatchImage img = PatchImage::make(2, 8, 1);
        for (int y = 0; y < 2; ++y) {
            for (int x = 0; x < 8; ++x) img.at(0, y, x) = static_cast<float>(x) / 7.0f;
        }
        const PatchImage out = puree::downscale_bicubic(img);
        REQUIRE(out.height == 1);
        REQUIRE(out.width == 4);
        for (int x = 0; x < 4; ++x) {
            REQUIRE(out.at(0, 0, x) ==
                    Catch::Approx(oracles::bicubic_direct(img, 0, 0, x)).margin(1e-6));
        }
    }
    SECTION("random images") {
        puree::Rng rng(77);
        for (int trial = 0; trial < 20; ++trial) {
            PatchImage img = PatchImage::make(6 + 2 * static_cast<int>(rng.index(4)),
                                              6 + 2 * static_cast<int>(rng.index(4)), 3);
            for (float& v : img.data) v = static_cast<float>(rng.uniform());
            const PatchImage out = puree::downscale_bicubic(img);
            for (int c = 0; c < 3; ++c) {
                for (int y = 0; y < out.height; ++y) {
                    for (int x = 0; x < out.width; ++x) {
                        REQUIRE(out.at(c, y, x) ==
                                Catch::Approx(oracles::bicubic_direct(img, c, y, x)).margin(1e-6));
                    }
                }
            }
        }
    }
}

TEST_CASE("all imaging operations keep values in [0,1]", "[property]") {
    puree::Rng rng(31);
    PatchImage img = PatchImage::make(12, 16, 3);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    const PatchImage normed = puree::white_normalize(img, Rect{0, 0, 3, 3});
    for (float v : normed.data) {
        REQUIRE(v >= 0.0f);
        REQUIRE(v <= 1.0f);
    }
    const PatchImage down = puree::downscale_bicubic(img);
    for (float v : down.data) {
        REQUIRE(v >= 0.0f);
        REQUIRE(v <= 1.0f);
    }
}

TEST_CASE("vectorize layout and round trip") {
    PatchImage img = PatchImage::make(puree::kNetPatchHeight, puree::kNetPatchWidth, 3);
    puree::Rng rng(5);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    img.at(0, 0, 0) = 0.125f;
    img.at(1, 0, 0) = 0.250f;
    img.at(2, 0, 0) = 0.375f;

    const auto v = puree::vectorize_patch(img);
    REQUIRE(v.size() == 3750);
    REQUIRE(v[0] == 0.125f);
    REQUIRE(v[1250] == 0.250f);
    REQUIRE(v[2500] == 0.375f);

    const PatchImage back = puree::unvectorize_patch(v);
    REQUIRE(back.data == img.data);

    REQUIRE_THROWS_AS(puree::vectorize_patch(PatchImage::make(10, 10, 3)), puree::ImageError);
}

TEST_CASE("raw float image round trip and header layout") {
    oracles::TempDir dir("rawio");
    PatchImage img = PatchImage::make(3, 5, 3);
    puree::Rng rng(9);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    const std::string path = dir.file("img.pfi");
    puree::save_raw_image(path, img);

    // header: u32 width, height, channels, reserved (little-endian)
    std::ifstream in(path, std::ios::binary);
    unsigned char hdr[16];
    in.read(reinterpret_cast<char*>(hdr), 16);
    REQUIRE(hdr[0] == 5);
    REQUIRE(hdr[4] == 3);
    REQUIRE(hdr[8] == 3);
    REQUIRE(hdr[12] == 0);

    const PatchImage back = puree::load_raw_image(path);
    REQUIRE(back.same_shape(img));
    REQUIRE(back.data == img.data);

    SECTION("truncated file fails") {
        std::ofstream out(dir.file("trunc.pfi"), std::ios::binary);
        out.write(reinterpret_cast<const char*>(hdr), 16);
        out.close();
        REQUIRE_THROWS_AS(puree::load_raw_image(dir.file("trunc.pfi")), puree::ImageError);
    }
}

TEST_CASE("png round trip") {
    oracles::TempDir dir("pngio");
    PatchImage img = PatchImage::make(7, 9, 3);
    puree::Rng rng(13);
    for (float& v : img.data) v = static_cast<float>(rng.index(256)) / 255.0f;
    const std::string path = dir.file("img.png");
    puree::save_png(path, img);
    const PatchImage back = puree::load_png(path);
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        REQUIRE(back.data[i] == Catch::Approx(img.data[i]).margin(0.5 / 255.0));
    }
    REQUIRE_THROWS_AS(puree::load_png(dir.file("missing.png")), puree::ImageError);
}

TEST_CASE("crop bounds") {
    const PatchImage img = ramp_image(6, 8);
    const PatchImage sub = puree::crop(img, Rect{1, 2, 3, 4});
    REQUIRE(sub.height == 3);
    REQUIRE(sub.width == 4);
    REQUIRE(sub.at(1, 0, 0) == img.at(1, 1, 2));
    REQUIRE_THROWS_AS(puree::crop(img, Rect{4, 4, 4, 4}), puree::ImageError);
}
