#pragma once

#include <span>
#include <stdexcept>

#include "memnet/device.hpp"

namespace memnet {

// All cut currents are zero, so the normalized distribution does not exist.
class UndefinedEntropyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// sigma = -sum p_k ln p_k with p_k = |I_k| / sum |I_k|; 0 ln 0 = 0.
[[nodiscard]] double entropy(std::span<const double> cut_currents);

enum class UnitClass { Off, On };

[[nodiscard]] const char* to_string(UnitClass c);

// Attainable unit extremes: both devices ON/OFF mixed (r_on || r_off) and
// both OFF (r_off / 2).
[[nodiscard]] double unit_on_resistance(const DeviceParams& p);
[[nodiscard]] double unit_off_resistance(const DeviceParams& p);
// Geometric mean of the two extremes.
[[nodiscard]] double classification_boundary(const DeviceParams& p);

// ON iff r_unit is below the boundary. Throws std::out_of_range outside
// the attainable range (with a 1e-5 relative allowance, so extremes quoted
// to five significant figures are accepted).
[[nodiscard]] UnitClass classify_unit(double r_unit, const DeviceParams& p);

}  // namespace memnet
