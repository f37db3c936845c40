#include "freqmark/stft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>

#include "freqmark/dft_reference.hpp"
#include "freqmark/errors.hpp"

namespace freqmark {

void StftConfig::validate() const {
    if (window_len < 4) throw Error("stft config: window_len must be >= 4");
    if (hop < 1 || hop > window_len) {
        throw Error("stft config: hop must be in [1, window_len]");
    }
    if (target_frequency <= 0.0 || target_frequency > 0.5) {
        throw Error("stft config: target_frequency must be in (0, 0.5]");
    }
    if (std::lround(target_frequency * window_len) < 1) {
        throw Error("stft config: target_frequency not resolvable at this window length");
    }
    if (threshold_tau <= 0.0 || threshold_tau >= 1.0) {
        throw Error("stft config: threshold_tau must be in (0, 1)");
    }
    if (smoothing_len < 1 || smoothing_len % 2 == 0) {
        throw Error("stft config: smoothing_len must be an odd integer >= 1");
    }
    if (min_segment_tokens < 1) {
        throw Error("stft config: min_segment_tokens must be >= 1");
    }
}

std::vector<double> hann_window(int n) {
    if (n < 2) throw Error("hann_window: length must be >= 2");
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
    }
    return w;
}

void fft_pow2(std::span<std::complex<double>> data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw Error("fft_pow2: size must be a power of two");
    }
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = data[i + j];
                const std::complex<double> v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

namespace {

// Bluestein's chirp-z transform: DFT of arbitrary length via power-of-two
// FFTs. The chirp and the padded filter spectrum depend only on the
// length, so a plan is built once and shared across all windows.
struct BluesteinPlan {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::complex<double>> chirp; // e^{-i pi t^2 / n}
    std::vector<std::complex<double>> filter_fft;

    explicit BluesteinPlan(std::size_t length) : n(length) {
        chirp.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            // t^2 mod 2n keeps the phase argument small
            const std::size_t sq = (t * t) % (2 * n);
            const double phase = std::numbers::pi * static_cast<double>(sq) /
                                 static_cast<double>(n);
            chirp[t] = std::complex<double>(std::cos(phase), -std::sin(phase));
        }
        m = std::bit_ceil(2 * n - 1);
        filter_fft.assign(m, {0.0, 0.0});
        for (std::size_t t = 0; t < n; ++t) {
            filter_fft[t] = std::conj(chirp[t]);
            if (t != 0) filter_fft[m - t] = std::conj(chirp[t]);
        }
        fft_pow2(filter_fft);
    }

    // scratch must have size m; overwritten on every call
    void apply(std::span<const double> x,
               std::span<std::complex<double>> scratch,
               std::span<std::complex<double>> out) const {
        for (std::size_t t = 0; t < n; ++t) scratch[t] = x[t] * chirp[t];
        std::fill(scratch.begin() + static_cast<std::ptrdiff_t>(n), scratch.end(),
                  std::complex<double>{0.0, 0.0});
        fft_pow2(scratch);
        for (std::size_t i = 0; i < m; ++i) scratch[i] *= filter_fft[i];
        fft_pow2(scratch, /*inverse=*/true);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n; ++k) out[k] = scratch[k] * scale * chirp[k];
    }
};

std::vector<std::complex<double>> bluestein(std::span<const double> x) {
    const BluesteinPlan plan(x.size());
    std::vector<std::complex<double>> scratch(plan.m);
    std::vector<std::complex<double>> out(x.size());
    plan.apply(x, scratch, out);
    return out;
}

Spectrogram stft_impl(const RankSequence& ranks, const StftConfig& cfg,
                      bool parallel, bool naive) {
    cfg.validate();
    const std::size_t len = ranks.ranks.size();
    if (len == 0) throw Error("stft: empty rank sequence");

    Spectrogram spec;
    if (len < static_cast<std::size_t>(cfg.window_len)) {
        // Whole-sequence DFT fallback for short inputs.
        spec.whole_sequence_fallback = true;
        spec.window_len = static_cast<int>(len);
        spec.window_starts = {0};
        if (len < 2) {
            spec.magnitudes = {{0.0}};
            spec.bin_frequencies = {0.0};
            return spec;
        }
    } else {
        spec.window_len = cfg.window_len;
        const std::size_t num_windows =
            (len - static_cast<std::size_t>(cfg.window_len)) /
                static_cast<std::size_t>(cfg.hop) +
            1;
        spec.window_starts.resize(num_windows);
        for (std::size_t w = 0; w < num_windows; ++w) {
            spec.window_starts[w] = w * static_cast<std::size_t>(cfg.hop);
        }
    }

    const int n = spec.window_len;
    spec.bin_frequencies.resize(n / 2 + 1);
    for (int b = 0; b <= n / 2; ++b) {
        spec.bin_frequencies[b] = static_cast<double>(b) / n;
    }
    const std::vector<double> hann = hann_window(n);
    double hann_sum = 0.0;
    for (double h : hann) hann_sum += h;
    spec.magnitudes.resize(spec.window_starts.size());

    const bool pow2 = (static_cast<std::size_t>(n) &
                       (static_cast<std::size_t>(n) - 1)) == 0;
    const std::size_t nbins = static_cast<std::size_t>(n) / 2 + 1;

    // Small windows (the common case) use a precomputed exponential table:
    // only the nbins magnitudes are consumed, and n^2/2 table lookups beat
    // the padding overhead of a power-of-two transform at this size.
    const bool small = !naive && n <= 32 && !pow2;
    std::vector<std::complex<double>> table; // [b * n + t]
    if (small) {
        table.resize(nbins * static_cast<std::size_t>(n));
        for (std::size_t b = 0; b < nbins; ++b) {
            for (int t = 0; t < n; ++t) {
                const double phase = -2.0 * std::numbers::pi *
                                     static_cast<double>(b) * t / n;
                table[b * n + t] =
                    std::complex<double>(std::cos(phase), std::sin(phase));
            }
        }
    }

    std::optional<BluesteinPlan> plan;
    if (!naive && !pow2 && !small) plan.emplace(static_cast<std::size_t>(n));
    const std::size_t scratch_len =
        plan ? plan->m : static_cast<std::size_t>(n);

    // The mean is taken with the window's weights so the windowed frame
    // sums to zero: removing the plain mean leaves a DC residue that the
    // Hann taper (itself a bin-1 cosine) would fold onto the target bin.
    const auto process = [&](std::size_t w, std::vector<double>& frame,
                             std::vector<std::complex<double>>& scratch,
                             std::vector<std::complex<double>>& spectrum) {
        const std::size_t start = spec.window_starts[w];
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += ranks.ranks[start + i] * hann[i];
        mean /= hann_sum;
        for (int i = 0; i < n; ++i) {
            frame[i] = (ranks.ranks[start + i] - mean) * hann[i];
        }
        auto& mags = spec.magnitudes[w];
        mags.resize(nbins);
        if (small) {
            for (std::size_t b = 0; b < nbins; ++b) {
                std::complex<double> acc(0.0, 0.0);
                const std::complex<double>* row = table.data() + b * n;
                for (int i = 0; i < n; ++i) acc += frame[i] * row[i];
                mags[b] = std::abs(acc);
            }
            return;
        }
        if (naive) {
            spectrum = naive_dft(frame);
        } else if (pow2) {
            for (int i = 0; i < n; ++i) scratch[i] = frame[i];
            fft_pow2(scratch);
            std::copy_n(scratch.begin(), n, spectrum.begin());
        } else {
            plan->apply(frame, scratch, spectrum);
        }
        for (std::size_t b = 0; b < nbins; ++b) mags[b] = std::abs(spectrum[b]);
    };

    if (parallel) {
#pragma omp parallel
        {
            std::vector<double> frame(n);
            std::vector<std::complex<double>> scratch(scratch_len);
            std::vector<std::complex<double>> spectrum(n);
#pragma omp for schedule(static)
            for (long long w = 0;
                 w < static_cast<long long>(spec.window_starts.size()); ++w) {
                process(static_cast<std::size_t>(w), frame, scratch, spectrum);
            }
        }
    } else {
        std::vector<double> frame(n);
        std::vector<std::complex<double>> scratch(scratch_len);
        std::vector<std::complex<double>> spectrum(n);
        for (std::size_t w = 0; w < spec.window_starts.size(); ++w) {
            process(w, frame, scratch, spectrum);
        }
    }
    return spec;
}

} // namespace

std::vector<std::complex<double>> dft(std::span<const double> frame) {
    const std::size_t n = frame.size();
    if (n == 0) throw Error("dft: empty frame");
    if ((n & (n - 1)) == 0) {
        std::vector<std::complex<double>> data(n);
        for (std::size_t i = 0; i < n; ++i) data[i] = frame[i];
        fft_pow2(data);
        return data;
    }
    return bluestein(frame);
}

Spectrogram stft(const RankSequence& ranks, const StftConfig& cfg) {
    return stft_impl(ranks, cfg, /*parallel=*/true, /*naive=*/false);
}

Spectrogram stft_serial(const RankSequence& ranks, const StftConfig& cfg) {
    // Plain loop over the naive transform, independent of the fft path.
    return stft_impl(ranks, cfg, /*parallel=*/false, /*naive=*/true);
}

std::vector<double> score_windows(const Spectrogram& spec, const StftConfig& cfg) {
    if (spec.magnitudes.empty()) throw Error("score_windows: empty spectrogram");
    const int n = spec.window_len;
    const int half = n / 2;
    int target_bin = static_cast<int>(std::lround(cfg.target_frequency * n));
    target_bin = std::clamp(target_bin, 1, std::max(half, 1));

    std::vector<double> scores(spec.magnitudes.size(), 0.0);
    for (std::size_t w = 0; w < spec.magnitudes.size(); ++w) {
        const auto& mags = spec.magnitudes[w];
        double total = 0.0;
        for (int b = 1; b <= half && b < static_cast<int>(mags.size()); ++b) {
            total += mags[b] * mags[b];
        }
        // Floor guards against all-but-constant frames whose only energy
        // is floating-point residue of the weighted-mean removal.
        if (total > 1e-9 && target_bin < static_cast<int>(mags.size())) {
            scores[w] = mags[target_bin] * mags[target_bin] / total;
        }
    }
    return scores;
}

} // namespace freqmark
