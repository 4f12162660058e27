#include "gabor.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace eyespot {

double GaborParams::resolved_sigma() const {
    if (sigma.has_value() == bandwidth.has_value()) {
        fail(ErrorCode::invalid_argument, "exactly one of sigma / bandwidth must be set");
    }
    const double s = sigma ? *sigma : sigma_from_bandwidth(wavelength, *bandwidth);
    if (!(s > 0.0)) {
        fail(ErrorCode::invalid_argument, "resolved sigma must be positive");
    }
    return s;
}

double sigma_from_bandwidth(double wavelength, double bandwidth) {
    if (!(wavelength > 0.0) || !(bandwidth > 0.0)) {
        fail(ErrorCode::invalid_argument, "wavelength and bandwidth must be positive");
    }
    const double pw = std::pow(2.0, bandwidth);
    return wavelength / std::numbers::pi * std::sqrt(std::log(2.0) / 2.0) * (pw + 1.0) / (pw - 1.0);
}

GaborKernel make_kernel(const GaborParams& p, int size, bool normalize) {
    if (!(p.wavelength > 0.0) || !(p.aspect > 0.0)) {
        fail(ErrorCode::invalid_argument, "wavelength and aspect must be positive");
    }
    const double sg = p.resolved_sigma();
    if (size <= 0) {
        size = static_cast<int>(std::ceil(6.0 * sg + 1.0));
        if (size % 2 == 0) ++size;
    } else if (size % 2 == 0) {
        fail(ErrorCode::invalid_argument, "kernel size must be odd");
    }
    GaborKernel k;
    k.size = size;
    k.params = p;
    k.params.sigma = sg;
    k.taps.resize(static_cast<std::size_t>(size) * size);
    const int half = size / 2;
    const double ct = std::cos(p.orientation);
    const double st = std::sin(p.orientation);
    for (int y = -half; y <= half; ++y) {
        for (int x = -half; x <= half; ++x) {
            const double xr = x * ct + y * st;
            const double yr = -x * st + y * ct;
            const double env = std::exp(-(xr * xr + p.aspect * p.aspect * yr * yr) /
                                        (2.0 * sg * sg));
            const double carrier = std::cos(2.0 * std::numbers::pi * xr / p.wavelength + p.phase);
            k.taps[static_cast<std::size_t>(y + half) * size + (x + half)] = env * carrier;
        }
    }
    if (normalize) {
        double mean = 0.0;
        for (double t : k.taps) mean += t;
        mean /= static_cast<double>(k.taps.size());
        double norm = 0.0;
        for (double& t : k.taps) {
            t -= mean;
            norm += t * t;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& t : k.taps) t /= norm;
        }
    }
    return k;
}

ImageGray convolve(const ImageGray& img, const GaborKernel& k) {
    ImageGray out(img.width, img.height);
    const int half = k.size / 2;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int j = -half; j <= half; ++j) {
                const int sy = y - j;
                if (sy < 0 || sy >= img.height) continue;
                for (int i = -half; i <= half; ++i) {
                    const int sx = x - i;
                    if (sx < 0 || sx >= img.width) continue;
                    acc += img.at(sx, sy) * k.at(i + half, j + half);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<GaborKernel> make_bank(const std::vector<double>& wavelengths,
                                   const std::vector<double>& orientations,
                                   const std::vector<double>& phases, double aspect,
                                   double bandwidth, bool normalize) {
    if (wavelengths.empty() || orientations.empty() || phases.empty()) {
        fail(ErrorCode::invalid_argument, "bank parameter lists must be non-empty");
    }
    std::vector<GaborKernel> bank;
    bank.reserve(wavelengths.size() * orientations.size() * phases.size());
    for (double wl : wavelengths) {
        for (double th : orientations) {
            for (double ph : phases) {
                GaborParams p;
                p.wavelength = wl;
                p.orientation = th;
                p.phase = ph;
                p.aspect = aspect;
                p.bandwidth = bandwidth;
                bank.push_back(make_kernel(p, 0, normalize));
            }
        }
    }
    return bank;
}

} // namespace eyespot
