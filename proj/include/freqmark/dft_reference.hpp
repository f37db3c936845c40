#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace freqmark {

// Naive O(N^2) DFT, evaluated straight from the definition. This is the
// serial reference the fast transform is tested and benchmarked against;
// it must stay independent of the fft path.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t b = 0; b < n; ++b) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double phase = -2.0 * std::numbers::pi *
                                 static_cast<double>(b) * static_cast<double>(t) /
                                 static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out[b] = acc;
    }
    return out;
}

} // namespace freqmark
