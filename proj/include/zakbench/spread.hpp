#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "window.hpp"

namespace zakbench {

struct SpreadResult {
    double time_variance = 0.0;       // Delta t^2 about a
    double frequency_variance = 0.0;  // Delta omega^2 about b
    double product = 0.0;
    std::int64_t transform_length = 0;
};

namespace detail {

// FFTW planning is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Forward DFT X_k = sum_j x_j e^{-2 pi i j k / n} of zero-padded input.
inline std::vector<cplx> padded_dft(std::span<const cplx> input, std::size_t n) {
    std::vector<cplx> data(n, cplx{0.0, 0.0});
    std::copy(input.begin(), input.end(), data.begin());
    auto* raw = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return data;
}

}  // namespace detail

/// Discrete time and frequency spreads of a sampled window.
///
/// The frequency side samples the continuous Fourier transform on the grid
/// nu_k = k N / (pad * len), k centred around zero, through a zero-padded DFT.
/// For windows with a divergent frequency moment the reported value keeps
/// growing with pad instead of converging.
inline SpreadResult time_frequency_spread(const SampledWindow& w, double a, double b, std::int64_t pad) {
    require(pad >= 1, "pad must be a positive integer");
    const double energy = w.energy();
    require(energy > 0.0, "zero-energy window");
    const double n = static_cast<double>(w.rate());

    double t_acc = 0.0;
    const auto samples = w.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = static_cast<double>(w.start() + static_cast<std::int64_t>(i)) / n;
        t_acc += (x - a) * (x - a) * norm2(samples[i]);
    }

    const std::size_t len = samples.size() * static_cast<std::size_t>(pad);
    const auto spectrum = detail::padded_dft(samples, len);
    const double dnu = n / static_cast<double>(len);
    double num = 0.0, den = 0.0;
    const auto half = static_cast<std::int64_t>(len / 2);
    for (std::size_t k = 0; k < len; ++k) {
        auto kk = static_cast<std::int64_t>(k);
        if (kk >= half && len > 1) kk -= static_cast<std::int64_t>(len);
        const double nu = static_cast<double>(kk) * dnu;
        const double p = norm2(spectrum[k]);
        num += (nu - b) * (nu - b) * p;
        den += p;
    }

    SpreadResult r;
    r.time_variance = (t_acc / n) / energy;
    r.frequency_variance = den > 0.0 ? num / den : 0.0;
    r.product = r.time_variance * r.frequency_variance;
    r.transform_length = static_cast<std::int64_t>(len);
    return r;
}

/// Riemann sum of |V w(t, nu)| over the centred lattice step*Z^2 restricted to
/// [-T, T] x [-K, K], with V w(t, nu) = int w(x) e^{-(x-t)^2} e^{2 pi i x nu} dx
/// evaluated by the window's own grid quadrature. Nested boxes share lattice
/// points, so the estimate is nondecreasing in T and K.
inline double feichtinger_norm_estimate(const SampledWindow& w, double T, double K, double step) {
    require(T > 0.0 && K > 0.0 && step > 0.0, "T, K and step must be positive");
    const auto it = static_cast<std::int64_t>(std::floor(T / step + 1e-9));
    const auto ik = static_cast<std::int64_t>(std::floor(K / step + 1e-9));
    const double n = static_cast<double>(w.rate());
    const auto samples = w.samples();
    constexpr double kGaussCut = 40.0;  // e^{-40} ~ 4e-18

    std::vector<double> row_sums(static_cast<std::size_t>(2 * it + 1), 0.0);
    parallel_for(row_sums.size(), [&](std::size_t ti) {
        const double t = static_cast<double>(static_cast<std::int64_t>(ti) - it) * step;
        // Contiguous run of Gaussian-weighted samples that survive the cut.
        std::vector<cplx> g;
        std::int64_t first = -1;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double x = static_cast<double>(w.start() + static_cast<std::int64_t>(i)) / n;
            const double d2 = (x - t) * (x - t);
            if (d2 > kGaussCut) {
                if (first >= 0) break;
                continue;
            }
            if (first < 0) first = w.start() + static_cast<std::int64_t>(i);
            g.push_back(samples[i] * std::exp(-d2));
        }
        auto transform_at = [&](std::int64_t l) {
            const double nu = static_cast<double>(l) * step;
            constexpr std::size_t kAnchor = 64;
            const double rot_arg = 2.0 * std::numbers::pi * nu / n;
            const cplx rot(std::cos(rot_arg), std::sin(rot_arg));
            cplx acc{0.0, 0.0}, phase{1.0, 0.0};
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (i % kAnchor == 0) {
                    const double arg = 2.0 * std::numbers::pi * nu *
                                       (static_cast<double>(first + static_cast<std::int64_t>(i)) / n);
                    phase = cplx(std::cos(arg), std::sin(arg));
                }
                acc += g[i] * phase;
                phase *= rot;
            }
            return std::abs(acc) / n;
        };
        double row = 0.0;
        if (!g.empty()) {
            row = transform_at(0);
            for (std::int64_t l = 1; l <= ik; ++l) row += transform_at(-l) + transform_at(l);
        }
        row_sums[ti] = row;
    });
    // Accumulate from the centre outwards so that enlarging T only appends terms.
    double total = row_sums[static_cast<std::size_t>(it)];
    for (std::int64_t d = 1; d <= it; ++d)
        total += row_sums[static_cast<std::size_t>(it - d)] + row_sums[static_cast<std::size_t>(it + d)];
    return total * step * step;
}

}  // namespace zakbench
