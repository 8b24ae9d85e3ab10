#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace puree {

class SpectrumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tabulated nonnegative curve over wavelength: an extinction coefficient in
// arbitrary normalized units, or a dimensionless channel responsivity.
// Values between samples are linearly interpolated.
struct Spectrum {
    std::vector<double> wavelengths_nm;
    std::vector<double> values;

    std::size_t size() const { return wavelengths_nm.size(); }
    double min_wavelength() const { return wavelengths_nm.front(); }
    double max_wavelength() const { return wavelengths_nm.back(); }

    bool covers(double lo_nm, double hi_nm) const {
        return !wavelengths_nm.empty() && min_wavelength() <= lo_nm && max_wavelength() >= hi_nm;
    }

    void validate(const std::string& what = "spectrum") const {
        if (wavelengths_nm.size() != values.size()) {
            throw SpectrumError(what + ": wavelength/value size mismatch");
        }
        if (wavelengths_nm.size() < 2) {
            throw SpectrumError(what + ": needs at least 2 samples");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(wavelengths_nm[i]) || !std::isfinite(values[i])) {
                throw SpectrumError(what + ": non-finite sample");
            }
            if (values[i] < 0.0) {
                throw SpectrumError(what + ": negative value");
            }
            if (i > 0 && wavelengths_nm[i] <= wavelengths_nm[i - 1]) {
                throw SpectrumError(what + ": non-increasing wavelengths");
            }
        }
    }

    // Linear interpolation; throws outside the tabulated domain.
    double at(double lambda_nm) const {
        if (wavelengths_nm.empty() || lambda_nm < min_wavelength() || lambda_nm > max_wavelength()) {
            throw SpectrumError("wavelength " + std::to_string(lambda_nm) + " nm outside spectrum domain");
        }
        auto it = std::lower_bound(wavelengths_nm.begin(), wavelengths_nm.end(), lambda_nm);
        const std::size_t hi = static_cast<std::size_t>(it - wavelengths_nm.begin());
        if (hi == 0 || wavelengths_nm[hi] == lambda_nm) {
            return values[hi];
        }
        const std::size_t lo = hi - 1;
        const double t = (lambda_nm - wavelengths_nm[lo]) / (wavelengths_nm[hi] - wavelengths_nm[lo]);
        return values[lo] + t * (values[hi] - values[lo]);
    }

    // Constant-valued spectrum over [lo, hi].
    static Spectrum constant(double lo_nm, double hi_nm, double value) {
        return Spectrum{{lo_nm, hi_nm}, {value, value}};
    }
};

// Composite trapezoid rule over sorted sample points.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return acc;
}

inline double trapezoid_integral(const Spectrum& s) { return trapezoid(s.wavelengths_nm, s.values); }

// Sorted union of all sample points of the given spectra, restricted to [lo, hi].
// The bounds themselves are always included.
inline std::vector<double> merged_grid(std::initializer_list<const Spectrum*> spectra,
                                       double lo_nm, double hi_nm) {
    std::vector<double> grid{lo_nm, hi_nm};
    for (const Spectrum* s : spectra) {
        for (double w : s->wavelengths_nm) {
            if (w > lo_nm && w < hi_nm) grid.push_back(w);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Loads a `wavelength_nm,value` CSV (header mandatory). Errors name the
// offending line.
inline Spectrum load_spectrum(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SpectrumError("cannot open spectrum file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SpectrumError(path + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "wavelength_nm,value") {
        throw SpectrumError(path + " line 1: expected header 'wavelength_nm,value'");
    }
    Spectrum s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = path + " line " + std::to_string(lineno);
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw SpectrumError(where + ": malformed row (expected 'wavelength,value')");
        }
        double w = 0.0, v = 0.0;
        try {
            std::size_t used = 0;
            w = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing junk");
            const std::string rest = line.substr(comma + 1);
            v = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw SpectrumError(where + ": malformed number");
        }
        if (!std::isfinite(w) || !std::isfinite(v)) {
            throw SpectrumError(where + ": non-finite value");
        }
        if (v < 0.0) {
            throw SpectrumError(where + ": negative value");
        }
        if (!s.wavelengths_nm.empty() && w <= s.wavelengths_nm.back()) {
            throw SpectrumError(where + ": non-increasing wavelength");
        }
        s.wavelengths_nm.push_back(w);
        s.values.push_back(v);
    }
    if (s.size() < 2) {
        throw SpectrumError(path + ": needs at least 2 data rows");
    }
    return s;
}

inline void save_spectrum(const std::string& path, const Spectrum& s) {
    std::ofstream out(path);
    if (!out) {
        throw SpectrumError("cannot write spectrum file: " + path);
    }
    out << "wavelength_nm,value\n";
    out.precision(12);
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.wavelengths_nm[i] << ',' << s.values[i] << '\n';
    }
}

}  // namespace puree
