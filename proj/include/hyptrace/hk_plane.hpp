#pragma once

// Heat kernel of the hyperbolic plane K_H(z, d) for complex time z = t + is, t > 0.

#include <cmath>
#include <complex>

#include "numerics.hpp"

namespace hyptrace {

class ComplexTime {
public:
    ComplexTime(double t, double s = 0.0) : t_(t), s_(s) {  // NOLINT(google-explicit-constructor)
        if (!(t > 0.0) || !std::isfinite(t) || !std::isfinite(s))
            throw DomainError("ComplexTime: real part t must be finite and > 0");
    }

    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double s() const noexcept { return s_; }
    [[nodiscard]] cplx z() const noexcept { return {t_, s_}; }
    [[nodiscard]] double modulus() const noexcept { return std::hypot(t_, s_); }
    /// Gaussian decay rate: |exp(-u^2 / 4z)| = exp(-eta u^2).
    [[nodiscard]] double eta() const noexcept { return t_ / (4.0 * (t_ * t_ + s_ * s_)); }
    [[nodiscard]] bool is_real() const noexcept { return s_ == 0.0; }
    [[nodiscard]] ComplexTime conj() const { return {t_, -s_}; }

private:
    double t_;
    double s_;
};

namespace detail {

/// The u-integral of the d > 0 representation,
///   J(z, d) = int_d^inf u exp(-u^2/4z) / sqrt(cosh u - cosh d) du,
/// split at d + 1. On [d, d + 1] we substitute cosh u = cosh d + v^2 which removes the
/// inverse square root: du / sqrt(cosh u - cosh d) = 2 dv / sinh u.
inline IntegralResult<cplx> hk_plane_u_integral(const ComplexTime& z, double d, const QuadratureConfig& cfg) {
    const cplx inv4z = 1.0 / (4.0 * z.z());
    const double eta = z.eta();
    const double U = gaussian_cutoff(eta, cfg.tail_cutoff_tol, 1, d);
    const double split = std::min(d + 1.0, U);
    const double base = 2.0 * std::sinh(0.5 * d) * std::sinh(0.5 * d);  // cosh d - 1

    auto near = [&](double v) -> cplx {
        const double x = base + v * v;
        const double u = acosh1p(x);
        const double sh = std::sqrt(x * (2.0 + x));
        if (sh == 0.0) return 2.0;  // limit u / sinh u -> 1 at d = v = 0
        return 2.0 * u / sh * std::exp(-u * u * inv4z);
    };
    const double vmax = std::sqrt(2.0 * std::sinh(0.5 * (split + d)) * std::sinh(0.5 * (split - d)));
    auto r = integrate_adaptive(near, 0.0, vmax, cfg);

    if (split < U) {
        auto far = [&](double u) -> cplx {
            const double gap = 2.0 * std::sinh(0.5 * (u + d)) * std::sinh(0.5 * (u - d));
            if (!std::isfinite(gap)) return 0.0;
            return u * std::exp(-u * u * inv4z) / std::sqrt(gap);
        };
        auto r2 = integrate_gaussian_tail(far, eta, cfg, 1, split);
        r.value += r2.value;
        r.error_estimate += r2.error_estimate;
    }
    return r;
}

/// The spectral integral int_0^inf exp(-r^2 z) tanh(pi r) r dr (the exp(-z/4) factor
/// is applied by the caller).
inline IntegralResult<cplx> hk_plane_spectral_integral(const ComplexTime& z, const QuadratureConfig& cfg) {
    const cplx zz = z.z();
    auto f = [&](double r) -> cplx { return std::exp(-r * r * zz) * std::tanh(kPi * r) * r; };
    // |exp(-r^2 z)| = exp(-t r^2): decay rate t, linear prefactor.
    return integrate_gaussian_tail(f, z.t(), cfg, 1, 0.0);
}

}  // namespace detail

/// K_H(z, d) together with its quadrature error estimate.
inline IntegralResult<cplx> hk_plane_with_error(const ComplexTime& z, double d, const QuadratureConfig& cfg = {}) {
    if (!(d >= 0.0)) throw DomainError("hk_plane: distance d must be >= 0");
    const cplx zz = z.z();
    const cplx e = std::exp(-zz / 4.0);
    try {
        if (d == 0.0) {
            auto r = detail::hk_plane_spectral_integral(z, cfg);
            const cplx pref = e / (2.0 * kPi);
            return {pref * r.value, std::abs(pref) * r.error_estimate};
        }
        const cplx w = 4.0 * kPi * zz;
        const cplx pref = std::sqrt(2.0) * e / (w * std::sqrt(w));
        auto r = detail::hk_plane_u_integral(z, d, cfg);
        return {pref * r.value, std::abs(pref) * r.error_estimate};
    } catch (const QuadratureFailure& f) {
        throw f.with_context("hk_plane(t=" + std::to_string(z.t()) + ", s=" + std::to_string(z.s()) +
                             ", d=" + std::to_string(d) + ")");
    }
}

/// Heat kernel of the hyperbolic plane at complex time z and distance d.
inline cplx hk_plane(const ComplexTime& z, double d, const QuadratureConfig& cfg = {}) {
    return hk_plane_with_error(z, d, cfg).value;
}

/// Right-hand side of the complex-time envelope
///   |K_H(z, d)| <= exp(s^2/4t) t^{-3/2} (t^2 + s^2)^{3/4} K_H(tau, d),  tau = |z|^2 / t.
inline double complex_bound_reference(const ComplexTime& z, double d, const QuadratureConfig& cfg = {}) {
    const double t = z.t(), s = z.s();
    const double tau = t + s * s / t;
    const double kt = hk_plane(ComplexTime(tau), d, cfg).real();
    return std::exp(s * s / (4.0 * t)) * std::pow(t, -1.5) * std::pow(t * t + s * s, 0.75) * kt;
}

}  // namespace hyptrace
