#include "memnet/observables.hpp"

#include <cmath>
#include <string>

namespace memnet {

double entropy(std::span<const double> cut_currents) {
    double total = 0.0;
    for (double i : cut_currents) total += std::fabs(i);
    if (!(total > 0.0)) throw UndefinedEntropyError("entropy: all cut currents are zero");
    double sigma = 0.0;
    for (double i : cut_currents) {
        const double p = std::fabs(i) / total;
        if (p > 0.0) sigma -= p * std::log(p);
    }
    // Rounding can leave a tiny negative value for a delta distribution.
    return sigma < 0.0 ? 0.0 : sigma;
}

const char* to_string(UnitClass c) { return c == UnitClass::On ? "ON" : "OFF"; }

double unit_on_resistance(const DeviceParams& p) { return p.r_on * p.r_off / (p.r_on + p.r_off); }

double unit_off_resistance(const DeviceParams& p) { return p.r_off / 2.0; }

double classification_boundary(const DeviceParams& p) {
    return std::sqrt(unit_on_resistance(p) * unit_off_resistance(p));
}

UnitClass classify_unit(double r_unit, const DeviceParams& p) {
    // Lowest attainable is both devices at r_on; the readout range is the
    // single-switch-per-unit band between the mixed state and both OFF.
    const double lo = unit_on_resistance(p);
    const double hi = unit_off_resistance(p);
    constexpr double slack = 1e-5;
    if (!(r_unit >= lo * (1.0 - slack) && r_unit <= hi * (1.0 + slack))) {
        throw std::out_of_range("classify: unit resistance " + std::to_string(r_unit) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return r_unit < classification_boundary(p) ? UnitClass::On : UnitClass::Off;
}

}  // namespace memnet
