#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memnet {

// Constants of a threshold current-controlled bipolar memristive device.
// SI units throughout: ohm, ohm/(s*A), ampere.
struct DeviceParams {
    double r_on = 10.0;
    double r_off = 200.0;
    double gamma = 1e6;
    double i_threshold = 0.01;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    [[nodiscard]] double memory_content() const { return r_off / r_on; }

    friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

// Parameter set used by every reproduction preset unless overridden.
[[nodiscard]] DeviceParams default_device_params();

// Polarity of a device relative to its unit's a->b reference direction.
enum class Orientation : int { Forward = 1, Reverse = -1 };

[[nodiscard]] constexpr double sign_of(Orientation o) { return static_cast<int>(o) > 0 ? 1.0 : -1.0; }

struct DeviceState {
    double x = 200.0;  // memristance, R(x) = x
    Orientation orientation = Orientation::Forward;

    [[nodiscard]] double resistance() const { return x; }

    // Current flowing a->b in the unit frame, seen from this device.
    [[nodiscard]] double own_current(double unit_current) const { return sign_of(orientation) * unit_current; }

    friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

// Voltage across the device in its own frame for a unit-frame current.
[[nodiscard]] double device_voltage(const DeviceState& state, double unit_current);

// Rate dx/dt for an own-frame current. Zero inside the deadzone |i| < I_t;
// the boundary |i| == I_t belongs to the active branch (rate 0 there too).
[[nodiscard]] double device_rate(double own_current, const DeviceParams& p);

// One explicit Euler step under a unit-frame current, hard-clamped to
// [r_on, r_off]. Positive own-frame current drives x toward r_off.
[[nodiscard]] DeviceState device_step(const DeviceState& state, double unit_current, double dt,
                                      const DeviceParams& p);

// Generic n-th order u-controlled memory element:
//   y = g(x, u, t) * u,   dx/dt = f(x, u, t)
// Evaluation is pure; state only changes through an explicit step.
class MemElement {
public:
    using Response = std::function<double(std::span<const double> x, double u, double t)>;
    using Evolution = std::function<std::vector<double>(std::span<const double> x, double u, double t)>;

    MemElement(std::size_t order, Response g, Evolution f);

    [[nodiscard]] std::size_t order() const { return order_; }

    struct Evaluation {
        double y = 0.0;
        std::vector<double> dx;
    };

    // Throws std::invalid_argument when x.size() != order().
    [[nodiscard]] Evaluation eval(std::span<const double> x, double u, double t) const;

private:
    std::size_t order_;
    Response g_;
    Evolution f_;
};

[[nodiscard]] MemElement::Evaluation memelement_eval(const MemElement& element, std::span<const double> x, double u,
                                                     double t);

// The threshold device as a first-order current-controlled memristive
// element: u is the own-frame current, y the voltage.
[[nodiscard]] MemElement threshold_memristor(const DeviceParams& p);

// Memoryless resistor limit (f == 0, g == resistance).
[[nodiscard]] MemElement linear_resistor(double resistance);

}  // namespace memnet
