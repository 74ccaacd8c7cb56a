#pragma once

// Batch arithmetic for the per-step device update. Devices are stored as two
// planes (forward / reverse device of each unit) so every kernel is a straight
// elementwise loop. A scalar reference implementation is always available; an
// AVX2 variant is selected at runtime when the CPU supports it. Both variants
// produce bit-identical results (no FMA contraction, same operation order).

#include <cstddef>
#include <span>
#include <string_view>

namespace memnet::kernels {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view isa_name(Isa isa);

// Best ISA supported by this CPU and build. MEMNET_ISA=scalar in the
// environment forces the reference kernels.
[[nodiscard]] Isa detect_isa();

[[nodiscard]] bool isa_available(Isa isa);

struct StepCoeffs {
    double gamma;
    double i_threshold;
    double dt;
    double r_on;
    double r_off;
};

// g[u] = closed_fwd[u] / x_fwd[u] + closed_rev[u] / x_rev[u]
// closed_* hold 1.0 (switch closed) or 0.0 (open).
using UnitConductanceFn = void (*)(std::span<const double> x_fwd, std::span<const double> x_rev,
                                   std::span<const double> closed_fwd, std::span<const double> closed_rev,
                                   std::span<double> g);

// Own-frame device currents from the unit voltage drop dv = phi_a - phi_b:
//   i_fwd = (dv / x_fwd) * closed_fwd,  i_rev = -((dv / x_rev) * closed_rev)
using DeviceCurrentsFn = void (*)(std::span<const double> dv, std::span<const double> x_fwd,
                                  std::span<const double> x_rev, std::span<const double> closed_fwd,
                                  std::span<const double> closed_rev, std::span<double> i_fwd,
                                  std::span<double> i_rev);

// In-place threshold Euler step with clamp. Returns true if any x changed.
using StepDevicesFn = bool (*)(std::span<double> x, std::span<const double> own_current, const StepCoeffs& c);

struct KernelSet {
    Isa isa;
    UnitConductanceFn unit_conductance;
    DeviceCurrentsFn device_currents;
    StepDevicesFn step_devices;
};

[[nodiscard]] const KernelSet& scalar_kernels();
// Falls back to the scalar set when the ISA is not available.
[[nodiscard]] const KernelSet& kernels_for(Isa isa);
[[nodiscard]] const KernelSet& active_kernels();

namespace scalar {
void unit_conductance(std::span<const double> x_fwd, std::span<const double> x_rev,
                      std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> g);
void device_currents(std::span<const double> dv, std::span<const double> x_fwd, std::span<const double> x_rev,
                     std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> i_fwd,
                     std::span<double> i_rev);
bool step_devices(std::span<double> x, std::span<const double> own_current, const StepCoeffs& c);
}  // namespace scalar

#if defined(MEMNET_HAVE_AVX2)
namespace avx2 {
void unit_conductance(std::span<const double> x_fwd, std::span<const double> x_rev,
                      std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> g);
void device_currents(std::span<const double> dv, std::span<const double> x_fwd, std::span<const double> x_rev,
                     std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> i_fwd,
                     std::span<double> i_rev);
bool step_devices(std::span<double> x, std::span<const double> own_current, const StepCoeffs& c);
}  // namespace avx2
#endif

}  // namespace memnet::kernels
