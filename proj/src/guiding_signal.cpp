#include "freqmark/guiding_signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "freqmark/errors.hpp"

namespace freqmark {

GuidingSignal::GuidingSignal(std::vector<int> amplitudes, int k_max)
    : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 2) {
        throw InvalidSignalError("guiding signal: period must be >= 2");
    }
    for (int a : amplitudes_) {
        if (a < 1 || a > k_max) {
            throw InvalidSignalError("guiding signal: amplitude " + std::to_string(a) +
                                     " outside [1, " + std::to_string(k_max) + "]");
        }
    }
    if (std::adjacent_find(amplitudes_.begin(), amplitudes_.end(),
                           std::not_equal_to<>()) == amplitudes_.end()) {
        throw InvalidSignalError(
            "guiding signal: constant amplitudes carry no frequency content");
    }
}

GuidingSignal GuidingSignal::sinusoidal(int period, int amp_min, int amp_max,
                                        int k_max) {
    if (period < 2) throw InvalidSignalError("sinusoidal signal: period must be >= 2");
    if (amp_min < 1 || amp_min >= amp_max || amp_max > k_max) {
        throw InvalidSignalError("sinusoidal signal: invalid amplitude range [" +
                                 std::to_string(amp_min) + ", " +
                                 std::to_string(amp_max) + "]");
    }
    const double center = 0.5 * (amp_min + amp_max);
    const double radius = 0.5 * (amp_max - amp_min);
    std::vector<int> amplitudes(period);
    for (int t = 0; t < period; ++t) {
        const double value =
            center + radius * std::sin(2.0 * std::numbers::pi * t / period);
        // std::round rounds half away from zero
        const double quantized = std::round(value);
        amplitudes[t] = static_cast<int>(
            std::clamp(quantized, static_cast<double>(amp_min),
                       static_cast<double>(amp_max)));
    }
    return GuidingSignal(std::move(amplitudes), k_max);
}

int GuidingSignal::max_amplitude() const {
    return *std::max_element(amplitudes_.begin(), amplitudes_.end());
}

GuidingSignal GuidingSignal::from_json(const nlohmann::json& j, int k_max) {
    if (!j.is_object()) throw InvalidSignalError("signal config: expected an object");
    const int period = j.value("period", 0);
    if (j.contains("amplitudes")) {
        std::vector<int> amplitudes = j.at("amplitudes").get<std::vector<int>>();
        if (period != 0 && period != static_cast<int>(amplitudes.size())) {
            throw InvalidSignalError("signal config: period does not match amplitudes");
        }
        return GuidingSignal(std::move(amplitudes), k_max);
    }
    if (j.value("shape", "") != "sine") {
        throw InvalidSignalError("signal config: need amplitudes or shape=\"sine\"");
    }
    return sinusoidal(period, j.at("amp_min").get<int>(), j.at("amp_max").get<int>(),
                      k_max);
}

nlohmann::json GuidingSignal::to_json() const {
    return nlohmann::json{{"period", period()}, {"amplitudes", amplitudes_}};
}

} // namespace freqmark
