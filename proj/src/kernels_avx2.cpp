// Compiled with -mavx2 (and without FMA contraction); only reached after a
// runtime CPU check in kernels_for().

#include "memnet/kernels.hpp"

#include <immintrin.h>

#include <cassert>

namespace memnet::kernels::avx2 {

void unit_conductance(std::span<const double> x_fwd, std::span<const double> x_rev,
                      std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> g) {
    const std::size_t n = g.size();
    assert(x_fwd.size() == n && x_rev.size() == n && closed_fwd.size() == n && closed_rev.size() == n);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d a = _mm256_div_pd(_mm256_loadu_pd(&closed_fwd[k]), _mm256_loadu_pd(&x_fwd[k]));
        const __m256d b = _mm256_div_pd(_mm256_loadu_pd(&closed_rev[k]), _mm256_loadu_pd(&x_rev[k]));
        _mm256_storeu_pd(&g[k], _mm256_add_pd(a, b));
    }
    for (; k < n; ++k) {
        g[k] = closed_fwd[k] / x_fwd[k] + closed_rev[k] / x_rev[k];
    }
}

void device_currents(std::span<const double> dv, std::span<const double> x_fwd, std::span<const double> x_rev,
                     std::span<const double> closed_fwd, std::span<const double> closed_rev, std::span<double> i_fwd,
                     std::span<double> i_rev) {
    const std::size_t n = dv.size();
    assert(i_fwd.size() == n && i_rev.size() == n);
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d v = _mm256_loadu_pd(&dv[k]);
        const __m256d f = _mm256_mul_pd(_mm256_div_pd(v, _mm256_loadu_pd(&x_fwd[k])), _mm256_loadu_pd(&closed_fwd[k]));
        const __m256d r = _mm256_mul_pd(_mm256_div_pd(v, _mm256_loadu_pd(&x_rev[k])), _mm256_loadu_pd(&closed_rev[k]));
        _mm256_storeu_pd(&i_fwd[k], f);
        _mm256_storeu_pd(&i_rev[k], _mm256_xor_pd(r, sign));
    }
    for (; k < n; ++k) {
        i_fwd[k] = (dv[k] / x_fwd[k]) * closed_fwd[k];
        i_rev[k] = -((dv[k] / x_rev[k]) * closed_rev[k]);
    }
}

bool step_devices(std::span<double> x, std::span<const double> own_current, const StepCoeffs& c) {
    assert(x.size() == own_current.size());
    const std::size_t n = x.size();
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d threshold = _mm256_set1_pd(c.i_threshold);
    const __m256d gamma = _mm256_set1_pd(c.gamma);
    const __m256d dt = _mm256_set1_pd(c.dt);
    const __m256d lo = _mm256_set1_pd(c.r_on);
    const __m256d hi = _mm256_set1_pd(c.r_off);
    __m256d any = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d own = _mm256_loadu_pd(&own_current[k]);
        const __m256d xs = _mm256_loadu_pd(&x[k]);
        const __m256d magnitude = _mm256_andnot_pd(sign, own);
        const __m256d active = _mm256_cmp_pd(magnitude, threshold, _CMP_GE_OQ);
        const __m256d delta = _mm256_mul_pd(_mm256_mul_pd(gamma, _mm256_sub_pd(magnitude, threshold)), dt);
        // delta >= 0, so copying the sign of own gives sgn(own) * delta;
        // x + (-delta) is exactly x - delta in IEEE arithmetic.
        const __m256d signed_delta = _mm256_xor_pd(delta, _mm256_and_pd(own, sign));
        const __m256d moved = _mm256_min_pd(_mm256_max_pd(_mm256_add_pd(xs, signed_delta), lo), hi);
        const __m256d next = _mm256_blendv_pd(xs, moved, active);
        any = _mm256_or_pd(any, _mm256_cmp_pd(next, xs, _CMP_NEQ_UQ));
        _mm256_storeu_pd(&x[k], next);
    }
    bool changed = _mm256_movemask_pd(any) != 0;
    if (k < n) {
        changed |= scalar::step_devices(x.subspan(k), own_current.subspan(k), c);
    }
    return changed;
}

}  // namespace memnet::kernels::avx2
