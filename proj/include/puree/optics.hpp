#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "puree/image.hpp"
#include "puree/rng.hpp"
#include "puree/spectrum.hpp"

namespace puree {

// Rendering integrates channel responses over this band.
inline constexpr double kLambdaLo = 400.0;
inline constexpr double kLambdaHi = 700.0;

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

// Relative mixture state: purée fraction c_p in [0,1] (water fraction is
// 1 - c_p) and a dimensionless mean photon path-length scale l > 0.
struct DilutionParams {
    double c_p = 1.0;
    double l = 1.0;

    void validate() const {
        if (!(c_p >= 0.0 && c_p <= 1.0)) {
            throw std::invalid_argument("DilutionParams: c_p must be in [0,1]");
        }
        if (!(l > 0.0)) {
            throw std::invalid_argument("DilutionParams: l must be > 0");
        }
    }
};

// One responsivity curve per output channel, each normalized to unit
// trapezoid integral over [400, 700] nm.
struct ConeCurves {
    Spectrum r;
    Spectrum g;
    Spectrum b;

    static constexpr double kNormTolerance = 1e-9;

    void validate() const {
        int idx = 0;
        for (const Spectrum* s : {&r, &g, &b}) {
            const std::string what = "cone curve " + std::string(1, "rgb"[idx++]);
            s->validate(what);
            if (!s->covers(kLambdaLo, kLambdaHi)) {
                throw SpectrumError(what + ": must cover [400,700] nm");
            }
            const double integral = trapezoid_integral(*s);
            if (std::fabs(integral - 1.0) > kNormTolerance) {
                throw SpectrumError(what + ": not normalized (integral " + std::to_string(integral) + ")");
            }
        }
    }

    // Rescales each curve to unit integral.
    void normalize() {
        for (Spectrum* s : {&r, &g, &b}) {
            const double integral = trapezoid_integral(*s);
            if (integral <= 0.0) {
                throw SpectrumError("cone curve with non-positive integral cannot be normalized");
            }
            for (double& v : s->values) v /= integral;
        }
    }

    static ConeCurves load(const std::string& r_path, const std::string& g_path,
                           const std::string& b_path) {
        ConeCurves c{load_spectrum(r_path), load_spectrum(g_path), load_spectrum(b_path)};
        c.validate();
        return c;
    }
};

// Synthesis nuisance parameters standing in for acquisition variation:
// per-pixel color noise, a low-frequency multiplicative texture field, and an
// exposure gain applied before clamping.
struct SynthNoiseParams {
    double color_noise_sd = 0.02;
    double texture_amplitude = 0.08;
    int texture_scale = 9;
    double exposure_gain = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (color_noise_sd < 0.0 || texture_amplitude < 0.0 || texture_scale < 0) {
            throw std::invalid_argument("SynthNoiseParams: negative parameter");
        }
        if (!(exposure_gain > 0.0)) {
            throw std::invalid_argument("SynthNoiseParams: exposure_gain must be > 0");
        }
    }
};

// Mixture absorbance A(lambda) = (eps_w(lambda)*(1-c_p) + eps_p(lambda)*c_p) * l,
// taken as a positive quantity; reflected intensity is exp(-A).
inline double mixture_absorbance(const Spectrum& eps_p, const Spectrum& eps_w,
                                 const DilutionParams& d, double lambda_nm) {
    d.validate();
    const double ep = eps_p.at(lambda_nm);
    const double ew = eps_w.at(lambda_nm);
    return (ew * (1.0 - d.c_p) + ep * d.c_p) * d.l;
}

// Channel response I_v = integral over [400,700] of Z_v(lambda) * exp(-A(lambda)),
// composite trapezoid on the union grid of all input sample points. Each
// response lands in [0,1] because the cones are normalized and exp(-A) <= 1.
inline Rgb perceived_rgb(const Spectrum& eps_p, const Spectrum& eps_w, const DilutionParams& d,
                         const ConeCurves& cones) {
    d.validate();
    for (const Spectrum* s : {&eps_p, &eps_w}) {
        if (!s->covers(kLambdaLo, kLambdaHi)) {
            throw SpectrumError("extinction spectrum must cover [400,700] nm");
        }
    }
    for (const Spectrum* s : {&cones.r, &cones.g, &cones.b}) {
        if (!s->covers(kLambdaLo, kLambdaHi)) {
            throw SpectrumError("cone curve must cover [400,700] nm");
        }
    }
    const std::vector<double> grid =
        merged_grid({&eps_p, &eps_w, &cones.r, &cones.g, &cones.b}, kLambdaLo, kLambdaHi);
    std::vector<double> transmittance(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        transmittance[i] = std::exp(-mixture_absorbance(eps_p, eps_w, d, grid[i]));
    }
    Rgb out;
    double* channel[3] = {&out.r, &out.g, &out.b};
    const Spectrum* cone[3] = {&cones.r, &cones.g, &cones.b};
    std::vector<double> integrand(grid.size());
    for (int v = 0; v < 3; ++v) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            integrand[i] = cone[v]->at(grid[i]) * transmittance[i];
        }
        *channel[v] = trapezoid(grid, integrand);
    }
    return out;
}

namespace detail {

// Box blur along rows with clamped window, repeated in place.
inline void box_blur_1d(std::vector<double>& v, int rows, int cols, int radius,
                        std::vector<double>& tmp) {
    if (radius < 1) return;
    tmp.resize(v.size());
    for (int r = 0; r < rows; ++r) {
        const double* src = v.data() + static_cast<std::size_t>(r) * cols;
        double* dst = tmp.data() + static_cast<std::size_t>(r) * cols;
        for (int x = 0; x < cols; ++x) {
            const int lo = std::max(0, x - radius);
            const int hi = std::min(cols - 1, x + radius);
            double acc = 0.0;
            for (int i = lo; i <= hi; ++i) acc += src[i];
            dst[x] = acc / (hi - lo + 1);
        }
    }
    v.swap(tmp);
}

inline void transpose(const std::vector<double>& in, int rows, int cols, std::vector<double>& out) {
    out.resize(in.size());
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            out[static_cast<std::size_t>(c) * rows + r] = in[static_cast<std::size_t>(r) * cols + c];
        }
    }
}

// Smoothed seeded Gaussian field rescaled to 1 +/- amplitude (min-max).
inline std::vector<double> texture_field(int h, int w, const SynthNoiseParams& noise, Rng& rng) {
    std::vector<double> field(static_cast<std::size_t>(h) * w);
    for (double& f : field) f = rng.normal();
    if (noise.texture_amplitude <= 0.0) {
        std::fill(field.begin(), field.end(), 1.0);
        return field;
    }
    const int radius = std::max(1, noise.texture_scale / 2);
    std::vector<double> tmp, t2;
    for (int pass = 0; pass < 3; ++pass) {
        box_blur_1d(field, h, w, radius, tmp);
        transpose(field, h, w, t2);
        field.swap(t2);
        box_blur_1d(field, w, h, radius, tmp);
        transpose(field, w, h, t2);
        field.swap(t2);
    }
    const auto [mn, mx] = std::minmax_element(field.begin(), field.end());
    const double lo = *mn, hi = *mx;
    if (hi > lo) {
        const double scale = 2.0 * noise.texture_amplitude / (hi - lo);
        for (double& f : field) f = 1.0 - noise.texture_amplitude + (f - lo) * scale;
    } else {
        std::fill(field.begin(), field.end(), 1.0);
    }
    return field;
}

}  // namespace detail

// Renders a patch of the mixture color: per pixel,
// clamp(base_v * texture(x,y) * gain + noise, 0, 1). Deterministic per seed;
// the texture field is drawn first, then the three channel noise planes.
inline PatchImage render_dilution_patch(const Spectrum& eps_p, const Spectrum& eps_w,
                                        const DilutionParams& d, const ConeCurves& cones,
                                        const SynthNoiseParams& noise, int height, int width) {
    if (height < 1 || width < 1) {
        throw std::invalid_argument("render_dilution_patch: dimensions must be >= 1");
    }
    noise.validate();
    const Rgb base = perceived_rgb(eps_p, eps_w, d, cones);
    const double base_v[3] = {base.r, base.g, base.b};

    Rng rng(noise.seed);
    const std::vector<double> field = detail::texture_field(height, width, noise, rng);

    PatchImage img = PatchImage::make(height, width, 3);
    for (int c = 0; c < 3; ++c) {
        float* plane = img.data.data() + img.plane_size() * c;
        for (std::size_t i = 0; i < img.plane_size(); ++i) {
            const double n = noise.color_noise_sd > 0.0 ? noise.color_noise_sd * rng.normal() : 0.0;
            plane[i] = clamp01(base_v[c] * field[i] * noise.exposure_gain + n);
        }
    }
    return img;
}

}  // namespace puree
