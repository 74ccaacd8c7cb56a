#include "memnet/device.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace memnet {

void DeviceParams::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("device." + field + ": " + why);
    };
    if (!std::isfinite(r_on) || r_on <= 0.0) fail("r_on", "must be positive and finite");
    if (!std::isfinite(r_off) || r_off <= r_on) fail("r_off", "must be finite and greater than r_on");
    if (!std::isfinite(gamma) || gamma <= 0.0) fail("gamma", "must be positive and finite");
    if (!std::isfinite(i_threshold) || i_threshold < 0.0) fail("i_threshold", "must be non-negative and finite");
}

DeviceParams default_device_params() { return DeviceParams{10.0, 200.0, 1e6, 0.01}; }

double device_voltage(const DeviceState& state, double unit_current) {
    return state.x * state.own_current(unit_current);
}

double device_rate(double own_current, const DeviceParams& p) {
    const double magnitude = std::fabs(own_current);
    if (magnitude < p.i_threshold) return 0.0;
    const double rate = p.gamma * (magnitude - p.i_threshold);
    if (own_current > 0.0) return rate;
    if (own_current < 0.0) return -rate;
    return 0.0;
}

DeviceState device_step(const DeviceState& state, double unit_current, double dt, const DeviceParams& p) {
    const double own = state.own_current(unit_current);
    const double magnitude = std::fabs(own);
    if (magnitude < p.i_threshold) return state;
    // Same operation order as the batch kernels so results agree bit for bit.
    const double delta = (p.gamma * (magnitude - p.i_threshold)) * dt;
    const double moved = own > 0.0 ? state.x + delta : (own < 0.0 ? state.x - delta : state.x);
    DeviceState next = state;
    next.x = std::min(std::max(moved, p.r_on), p.r_off);
    return next;
}

MemElement::MemElement(std::size_t order, Response g, Evolution f)
    : order_(order), g_(std::move(g)), f_(std::move(f)) {
    if (!g_ || !f_) throw std::invalid_argument("MemElement: response and evolution functions are required");
}

MemElement::Evaluation MemElement::eval(std::span<const double> x, double u, double t) const {
    if (x.size() != order_) {
        throw std::invalid_argument("MemElement: state has dimension " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(order_));
    }
    Evaluation out;
    out.y = g_(x, u, t) * u;
    out.dx = f_(x, u, t);
    if (out.dx.size() != order_) throw std::logic_error("MemElement: evolution returned wrong dimension");
    return out;
}

MemElement::Evaluation memelement_eval(const MemElement& element, std::span<const double> x, double u, double t) {
    return element.eval(x, u, t);
}

MemElement threshold_memristor(const DeviceParams& p) {
    p.validate();
    return MemElement(
        1, [](std::span<const double> x, double, double) { return x[0]; },
        [p](std::span<const double>, double u, double) { return std::vector<double>{device_rate(u, p)}; });
}

MemElement linear_resistor(double resistance) {
    return MemElement(
        1, [resistance](std::span<const double>, double, double) { return resistance; },
        [](std::span<const double>, double, double) { return std::vector<double>{0.0}; });
}

}  // namespace memnet
