#include "memnet/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace memnet::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(MEMNET_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa detect_isa() {
    if (const char* forced = std::getenv("MEMNET_ISA"); forced != nullptr && std::strcmp(forced, "scalar") == 0) {
        return Isa::Scalar;
    }
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

namespace scalar {

void unit_conductance(std::span<const double> x_fwd, std::span<const double> x_rev,
                      std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> g) {
    const std::size_t n = g.size();
    assert(x_fwd.size() == n && x_rev.size() == n && closed_fwd.size() == n && closed_rev.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
        g[k] = closed_fwd[k] / x_fwd[k] + closed_rev[k] / x_rev[k];
    }
}

void device_currents(std::span<const double> dv, std::span<const double> x_fwd, std::span<const double> x_rev,
                     std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> i_fwd,
                     std::span<double> i_rev) {
    const std::size_t n = dv.size();
    assert(i_fwd.size() == n && i_rev.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
        i_fwd[k] = (dv[k] / x_fwd[k]) * closed_fwd[k];
        i_rev[k] = -((dv[k] / x_rev[k]) * closed_rev[k]);
    }
}

bool step_devices(std::span<double> x, std::span<const double> own_current, const StepCoeffs& c) {
    assert(x.size() == own_current.size());
    bool changed = false;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double own = own_current[k];
        const double magnitude = std::fabs(own);
        if (magnitude < c.i_threshold) continue;
        const double delta = (c.gamma * (magnitude - c.i_threshold)) * c.dt;
        const double moved = own > 0.0 ? x[k] + delta : (own < 0.0 ? x[k] - delta : x[k]);
        const double next = std::min(std::max(moved, c.r_on), c.r_off);
        changed |= next != x[k];
        x[k] = next;
    }
    return changed;
}

}  // namespace scalar

const KernelSet& scalar_kernels() {
    static const KernelSet set{Isa::Scalar, &scalar::unit_conductance, &scalar::device_currents,
                               &scalar::step_devices};
    return set;
}

const KernelSet& kernels_for(Isa isa) {
#if defined(MEMNET_HAVE_AVX2)
    static const KernelSet avx2_set{Isa::Avx2, &avx2::unit_conductance, &avx2::device_currents, &avx2::step_devices};
    if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return avx2_set;
#endif
    (void)isa;
    return scalar_kernels();
}

const KernelSet& active_kernels() {
    static const KernelSet& set = kernels_for(detect_isa());
    return set;
}

}  // namespace memnet::kernels
