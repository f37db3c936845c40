#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "freqmark/token.hpp"

namespace freqmark {

// Periodic integer amplitude sequence dictating which candidate rank the
// embedder selects at each step. Immutable after construction.
//
// Invariants enforced at construction:
//   - period >= 2
//   - every amplitude in [1, k_max]
//   - at least two distinct amplitude values (a constant signal has no
//     frequency content and is undetectable)
class GuidingSignal {
public:
    explicit GuidingSignal(std::vector<int> amplitudes, int k_max = kMaxCandidates);

    // Quantized sinusoid: amplitudes[t] = round(c + r*sin(2*pi*t/period))
    // clipped to [amp_min, amp_max], c and r the midpoint and half-range.
    // Rounding is half away from zero.
    static GuidingSignal sinusoidal(int period, int amp_min, int amp_max,
                                    int k_max = kMaxCandidates);

    int period() const { return static_cast<int>(amplitudes_.size()); }
    double base_frequency() const { return 1.0 / period(); }
    const std::vector<int>& amplitudes() const { return amplitudes_; }

    int amplitude_at(std::size_t t) const {
        return amplitudes_[t % amplitudes_.size()];
    }
    int max_amplitude() const;

    // Config forms: {"period": int, "amplitudes": [int...]} or
    // {"period": int, "amp_min": int, "amp_max": int, "shape": "sine"}.
    static GuidingSignal from_json(const nlohmann::json& j, int k_max = kMaxCandidates);
    nlohmann::json to_json() const;

    bool operator==(const GuidingSignal& other) const = default;

private:
    std::vector<int> amplitudes_;
};

} // namespace freqmark
