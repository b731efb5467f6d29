#pragma once

// Heat kernels and heat traces on the infinite hyperbolic cone C_q.
//
// Two closed forms of the elliptic trace are provided (the cosh/sinh^2 integral and
// the exponential-weight integral over the real line), the trace over the truncated
// region C_q \ C_{q,delta} in closed form and by brute-force quadrature of the
// periodized kernel, and the explicit q-independent bound on the truncated trace.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "hk_plane.hpp"
#include "numerics.hpp"

namespace hyptrace {

struct ConeTraceConfig {
    QuadratureConfig quad{};
    /// Evaluate the n-sum as (n, q-n) pairs plus the middle term. Turning this off
    /// sums every n separately (used to test the pairing).
    bool pair_symmetric = true;
};

struct DegenerationBoundParams {
    double eta;
    double gamma;
    double delta;

    DegenerationBoundParams(double delta_, const ComplexTime& z)
        : eta(z.eta()), gamma(std::log1p((delta_ / kTwoPi) * (delta_ / kTwoPi))), delta(delta_) {
        if (!(delta_ > 0.0)) throw DomainError("DegenerationBoundParams: delta must be > 0");
    }
};

/// Helper distances of the truncated-trace computation, for the pair (n, q).
class TruncationGeometry {
public:
    TruncationGeometry(const ConeParams& cone, long long n) : q_(cone.q()), sigma_(cone.sin_ratio(n)) {}

    [[nodiscard]] double sigma() const noexcept { return sigma_; }

    /// a(n,q,rho) = d(x, gamma^n x) = arccosh(1 + 2 sin^2(n pi/q) sinh^2 rho)
    [[nodiscard]] double a(double rho) const {
        const double sh = std::sinh(rho);
        return acosh1p(2.0 * sigma_ * sigma_ * sh * sh);
    }
    /// b(n,q,x) = arccosh(1 + 2 sin^2(n pi/q)(x^2 - 1)), x >= 1
    [[nodiscard]] double b(double x) const {
        if (!(x >= 1.0)) throw DomainError("TruncationGeometry::b: requires x >= 1");
        return acosh1p(2.0 * sigma_ * sigma_ * (x - 1.0) * (x + 1.0));
    }
    /// c(n,q,u) = sqrt(1 + (cosh u - 1) / (2 sin^2(n pi/q)))
    [[nodiscard]] double c(double u) const {
        const double sh = std::sinh(0.5 * u);
        return std::sqrt(1.0 + sh * sh / (sigma_ * sigma_));
    }
    /// d(n,q,delta) = b(n,q,1 + q delta/2pi)
    [[nodiscard]] double d(double delta) const {
        const double w = q_ * delta / kTwoPi;  // x - 1
        return acosh1p(2.0 * sigma_ * sigma_ * w * (2.0 + w));
    }

private:
    int q_;
    double sigma_;
};

namespace detail {

/// Visits the n-sum over 1..q-1 as (n, weight) pairs.
template <class Fn>
void for_each_cone_index(int q, bool pair_symmetric, Fn&& fn) {
    if (!pair_symmetric) {
        for (int n = 1; n < q; ++n) fn(n, 1.0);
        return;
    }
    for (int n = 1; 2 * n < q; ++n) fn(n, 2.0);
    if (q % 2 == 0 && q >= 2) fn(q / 2, 1.0);
}

/// cosh(u/2) / (sinh^2(u/2) + sigma^2), written in exp(-u/2) so large u cannot overflow.
inline double elliptic_kernel(double u, double sigma) {
    const double e = std::exp(-0.5 * u);
    const double e2 = e * e;
    const double one_minus = -std::expm1(-u);  // 1 - e^2
    return 0.5 * (e + e2 * e) / (0.25 * one_minus * one_minus + sigma * sigma * e2);
}

/// Geometric breakpoints sigma, 4 sigma, 16 sigma, ... below `upper`; the elliptic kernel
/// has a peak of width ~sigma at the origin when sin(n pi/q) is small.
inline std::vector<double> sigma_breakpoints(double sigma, double upper) {
    std::vector<double> pts;
    for (double p = sigma; p < upper && pts.size() < 40; p *= 4.0) pts.push_back(p);
    return pts;
}

/// f'(u) of the truncated trace, times 2v, in the variable u = d + v^2 (v >= 0).
/// X = 1 + q delta / 2pi; sigma = sin(n pi / q).
inline double f_prime_substituted(double v, double d, double X, double sigma) {
    const double u = d + v * v;
    if (u > 650.0) return 0.0;
    const double sh_half = std::sinh(0.5 * u);
    const double v2h = 0.5 * v * v;
    // sinh(v^2/2) / v^2, -> 1/2 at v = 0
    const double sinhc = v2h < 1e-4 ? 0.5 * (1.0 + v2h * v2h / 6.0) : std::sinh(v2h) / (v * v);
    const double denom = 2.0 * std::sqrt(2.0) * (sh_half * sh_half + sigma * sigma) *
                         std::sqrt(2.0 * std::sinh(0.5 * (u + d)) * sinhc);
    return 2.0 * X * sigma * std::sinh(u) / denom;
}

/// f'(u) itself for u > d.
inline double f_prime_direct(double u, double d, double X, double sigma) {
    if (u > 650.0) return 0.0;
    const double sh_half = std::sinh(0.5 * u);
    const double gap = 2.0 * std::sinh(0.5 * (u + d)) * std::sinh(0.5 * (u - d));  // cosh u - cosh d
    return X * sigma * std::sinh(u) / (2.0 * std::sqrt(2.0) * (sh_half * sh_half + sigma * sigma) * std::sqrt(gap));
}

/// int_d^inf exp(-(u^2 - d^2)/4z) f'(u) du; the exp(-d^2/4z) factor is applied by the caller.
/// Split at d + 1; the inverse square root at u = d is removed by u = d + v^2.
inline IntegralResult<cplx> truncated_summand_scaled(const ComplexTime& z, double d, double X, double sigma,
                                                     const QuadratureConfig& cfg) {
    const cplx inv4z = 1.0 / (4.0 * z.z());
    const double eta = z.eta();
    const double U = gaussian_cutoff(eta, cfg.tail_cutoff_tol, 0, d);
    const double split = std::min(d + 1.0, U);
    auto near = [&](double v) -> cplx {
        const double u = d + v * v;
        return std::exp(-(v * v) * (u + d) * inv4z) * f_prime_substituted(v, d, X, sigma);
    };
    const double vmax = std::sqrt(split - d);
    std::vector<double> cuts;
    if (d == 0.0) cuts = sigma_breakpoints(std::sqrt(sigma), vmax);
    auto r = integrate_adaptive(near, 0.0, vmax, cfg, cuts);
    if (split < U) {
        auto far = [&](double u) -> cplx {
            return std::exp(-(u - d) * (u + d) * inv4z) * f_prime_direct(u, d, X, sigma);
        };
        auto r2 = integrate_gaussian_tail(far, eta, cfg, 0, split);
        r.value += r2.value;
        r.error_estimate += r2.error_estimate;
    }
    return r;
}

}  // namespace detail

/// f'(u, q, n) for the truncation level delta, as a plain function of u > d(n, q, delta).
inline double truncated_f_prime(const ConeParams& cone, long long n, double delta, double u) {
    const TruncationGeometry g(cone, n);
    const double X = 1.0 + cone.q() * delta / kTwoPi;
    const double d = g.d(delta);
    if (!(u > d)) throw DomainError("truncated_f_prime: requires u > d(n, q, delta)");
    return detail::f_prime_direct(u, d, X, g.sigma());
}

/// int_{d(n,q,delta)}^inf f'(u, q, n) du by quadrature (the closed value is pi/2).
inline IntegralResult<double> truncated_f_prime_mass(const ConeParams& cone, long long n, double delta,
                                                     const QuadratureConfig& cfg = {}) {
    const TruncationGeometry g(cone, n);
    const double X = 1.0 + cone.q() * delta / kTwoPi;
    const double d = g.d(delta);
    // f' decays like exp(-(u - d)/2); integrate on [d, d + 80] with a tail bound.
    auto near = [&](double v) { return detail::f_prime_substituted(v, d, X, g.sigma()); };
    auto r = integrate_adaptive(near, 0.0, 1.0, cfg, detail::sigma_breakpoints(std::sqrt(g.sigma()), 1.0));
    auto far = [&](double u) { return detail::f_prime_direct(u, d, X, g.sigma()); };
    auto r2 = integrate_adaptive(far, d + 1.0, d + 80.0, cfg, std::array{d + 5.0, d + 20.0});
    return {r.value + r2.value, r.error_estimate + r2.error_estimate + 4.0 * X * std::exp(-40.0)};
}

/// Heat kernel of C_q between two cone points: sum_{n=0}^{q-1} K_H(z, d(p1, gamma^n p2)).
inline IntegralResult<cplx> cone_heat_kernel(const ConeParams& cone, const ComplexTime& z, const ConePoint& p1,
                                             const ConePoint& p2, const QuadratureConfig& cfg = {}) {
    const int q = cone.q();
    const bool diagonal = p1.rho == p2.rho && p1.theta == p2.theta;
    IntegralResult<cplx> total;
    for (int n = 0; n < q; ++n) {
        double d;
        if (diagonal) {
            d = cone_displacement(cone, n, p1.rho);
        } else {
            // cosh d - 1 = 2 sinh^2((r1-r2)/2) + 2 sinh r1 sinh r2 sin^2(Delta/2)
            const double delta_phi = (p1.theta - p2.theta) / q - kTwoPi * n / q;
            const double sd = std::sinh(0.5 * (p1.rho - p2.rho));
            const double sp = std::sin(0.5 * delta_phi);
            d = acosh1p(2.0 * sd * sd + 2.0 * std::sinh(p1.rho) * std::sinh(p2.rho) * sp * sp);
        }
        try {
            auto k = hk_plane_with_error(z, d, cfg);
            total.value += k.value;
            total.error_estimate += k.error_estimate;
        } catch (const QuadratureFailure& f) {
            throw f.with_context("cone_heat_kernel n=" + std::to_string(n));
        }
    }
    return total;
}

/// The n-th summand integral int_0^inf exp(-u^2/4z) cosh(u/2) / (sinh^2(u/2) + sin^2(n pi/q)) du.
inline IntegralResult<cplx> elliptic_cone_summand(const ConeParams& cone, long long n, const ComplexTime& z,
                                                  const QuadratureConfig& cfg = {}) {
    const double sigma = cone.sin_ratio(n);
    if (sigma == 0.0) throw DomainError("elliptic_cone_summand: n must not be divisible by q");
    const cplx inv4z = 1.0 / (4.0 * z.z());
    auto f = [&](double u) -> cplx { return std::exp(-u * u * inv4z) * detail::elliptic_kernel(u, sigma); };
    const double U = gaussian_cutoff(z.eta(), cfg.tail_cutoff_tol);
    return integrate_gaussian_tail(f, z.eta(), cfg, 0, 0.0, detail::sigma_breakpoints(sigma, U));
}

/// Elliptic heat trace of one cone of order q:
///   exp(-z/4) / (q sqrt(16 pi z)) sum_{n=1}^{q-1} int_0^inf exp(-u^2/4z) cosh(u/2) / (sinh^2(u/2) + sin^2(n pi/q)) du
inline IntegralResult<cplx> elliptic_cone_trace(const ConeParams& cone, const ComplexTime& z,
                                                const ConeTraceConfig& cfg = {}) {
    const int q = cone.q();
    IntegralResult<cplx> sum;
    if (q < 2) return sum;
    detail::for_each_cone_index(q, cfg.pair_symmetric, [&](int n, double w) {
        try {
            auto r = elliptic_cone_summand(cone, n, z, cfg.quad);
            sum.value += w * r.value;
            sum.error_estimate += w * r.error_estimate;
        } catch (const QuadratureFailure& f) {
            throw f.with_context("elliptic_cone_trace q=" + std::to_string(q) + " n=" + std::to_string(n));
        }
    });
    const cplx zz = z.z();
    const cplx pref = std::exp(-zz / 4.0) / (static_cast<double>(q) * std::sqrt(16.0 * kPi * zz));
    return {pref * sum.value, std::abs(pref) * sum.error_estimate};
}

/// The r-integral int_R exp(-2 pi n r/q - t r^2) / (1 + exp(-2 pi r)) dr, at real time t.
inline IntegralResult<double> hejhal_summand(const ConeParams& cone, long long n, double t,
                                             const QuadratureConfig& cfg = {}) {
    if (!(t > 0.0)) throw DomainError("hejhal_summand: requires t > 0");
    const int q = cone.q();
    long long m = n % q;
    if (m < 0) m += q;
    if (m == 0) throw DomainError("hejhal_summand: n must not be divisible by q");
    const double a = kTwoPi * static_cast<double>(m) / q;
    auto f = [&](double r) {
        double w;
        if (r >= 0.0) w = std::exp(-a * r) / (1.0 + std::exp(-kTwoPi * r));
        else w = std::exp((kTwoPi - a) * r) / (1.0 + std::exp(kTwoPi * r));
        return std::exp(-t * r * r) * w;
    };
    const double U = gaussian_cutoff(t, cfg.tail_cutoff_tol);
    const std::array cuts{-0.25 * U, 0.0, 0.25 * U};
    auto res = integrate_adaptive(f, -U, U, cfg, cuts);
    res.error_estimate += 2.0 * std::exp(-t * U * U) / (2.0 * t * U);
    return res;
}

/// Elliptic trace of one cone in the exponential-weight form, real time only:
///   sum_n exp(-t/4) / (2 q sin(n pi/q)) int_R exp(-2 pi n r/q - t r^2) / (1 + exp(-2 pi r)) dr
inline IntegralResult<double> elliptic_cone_trace_hejhal(const ConeParams& cone, double t,
                                                         const ConeTraceConfig& cfg = {}) {
    if (!(t > 0.0)) throw DomainError("elliptic_cone_trace_hejhal: requires t > 0");
    const int q = cone.q();
    IntegralResult<double> sum;
    if (q < 2) return sum;
    // No pairing here: the weight exp(-2 pi n r/q) is not symmetric under n -> q - n.
    for (int n = 1; n < q; ++n) {
        try {
            auto r = hejhal_summand(cone, n, t, cfg.quad);
            const double c = 1.0 / (2.0 * q * cone.sin_ratio(n));
            sum.value += c * r.value;
            sum.error_estimate += c * r.error_estimate;
        } catch (const QuadratureFailure& f) {
            throw f.with_context("elliptic_cone_trace_hejhal q=" + std::to_string(q) + " n=" + std::to_string(n));
        }
    }
    const double e = std::exp(-t / 4.0);
    return {e * sum.value, e * sum.error_estimate};
}

/// Trace of (K_{C_q} - K_H)(z, x, x) over C_q \ C_{q,delta}:
///   exp(-z/4) / (2 q sqrt(pi z)) sum_n (1/sin(n pi/q)) int_{d(n,q,delta)}^inf exp(-u^2/4z) f'(u,q,n) du
/// At delta = 0 this is the elliptic cone trace.
inline IntegralResult<cplx> truncated_cone_trace(const ConeParams& cone, double delta, const ComplexTime& z,
                                                 const ConeTraceConfig& cfg = {}) {
    if (!(delta >= 0.0)) throw DomainError("truncated_cone_trace: delta must be >= 0");
    const int q = cone.q();
    IntegralResult<cplx> sum;
    if (q < 2) return sum;
    const double X = 1.0 + q * delta / kTwoPi;
    const cplx inv4z = 1.0 / (4.0 * z.z());
    detail::for_each_cone_index(q, cfg.pair_symmetric, [&](int n, double w) {
        const TruncationGeometry g(cone, n);
        const double d = g.d(delta);
        try {
            auto r = detail::truncated_summand_scaled(z, d, X, g.sigma(), cfg.quad);
            const cplx scale = std::exp(-d * d * inv4z) * (w / g.sigma());
            sum.value += scale * r.value;
            sum.error_estimate += std::abs(scale) * r.error_estimate;
        } catch (const QuadratureFailure& f) {
            throw f.with_context("truncated_cone_trace q=" + std::to_string(q) + " n=" + std::to_string(n));
        }
    });
    const cplx zz = z.z();
    const cplx pref = std::exp(-zz / 4.0) / (2.0 * q * std::sqrt(kPi * zz));
    return {pref * sum.value, std::abs(pref) * sum.error_estimate};
}

/// Brute-force value of the truncated trace: (2 pi / q) int_{r(delta,q)}^inf sum_n K_H(z, a(n,q,rho)) sinh rho drho,
/// with every K_H evaluated by its own quadrature. The reported error adds the outer
/// quadrature error to the integrated inner error estimates.
inline IntegralResult<cplx> truncated_cone_trace_oracle(const ConeParams& cone, double delta, const ComplexTime& z,
                                                        const ConeTraceConfig& cfg = {}) {
    if (!(delta >= 0.0)) throw DomainError("truncated_cone_trace_oracle: delta must be >= 0");
    const int q = cone.q();
    if (q < 2) return {};
    const double r0 = acosh1p(q * delta / kTwoPi);
    const QuadratureConfig inner = cfg.quad.with_rel_tol(std::min(cfg.quad.rel_tol, 1e-12));

    std::vector<std::pair<TruncationGeometry, double>> terms;
    detail::for_each_cone_index(q, cfg.pair_symmetric,
                                [&](int n, double w) { terms.emplace_back(TruncationGeometry(cone, n), w); });

    auto f = [&](double rho) -> std::array<double, 3> {
        std::array<double, 3> acc{0.0, 0.0, 0.0};
        const double sh = std::sinh(rho);
        for (const auto& [g, w] : terms) {
            auto k = hk_plane_with_error(z, g.a(rho), inner);
            acc[0] += w * k.value.real() * sh;
            acc[1] += w * k.value.imag() * sh;
            acc[2] += w * k.error_estimate * sh;
        }
        return acc;
    };

    // Cut off where the smallest displacement a(1, q, rho) has left the Gaussian window.
    const double sigma_min = cone.sin_ratio(1);
    const double a0 = TruncationGeometry(cone, 1).a(r0);
    const double a_max = gaussian_cutoff(z.eta(), cfg.quad.tail_cutoff_tol, 2, a0) + 2.0;
    const double rho_max = std::asinh(std::sinh(0.5 * a_max) / sigma_min);
    std::vector<double> cuts;
    for (double p = r0 + 0.125; p < rho_max; p = r0 + 2.0 * (p - r0)) cuts.push_back(p);

    try {
        auto r = integrate_adaptive(f, r0, rho_max, cfg.quad, cuts);
        const double c = kTwoPi / q;
        return {c * cplx(r.value[0], r.value[1]), c * (r.error_estimate + r.value[2])};
    } catch (const QuadratureFailure& fail) {
        throw fail.with_context("truncated_cone_trace_oracle q=" + std::to_string(q));
    }
}

/// q-independent bound on |truncated_cone_trace(q, delta, z)|:
///   exp(-t/4) / sqrt(pi |z|) (delta/2pi)^{-2 eta gamma} [zeta(1 + 2 eta gamma) + pi]
inline double degeneration_bound(const DegenerationBoundParams& p, const ComplexTime& z) {
    if (!(p.delta > 0.0)) throw DomainError("degeneration_bound: delta must be > 0");
    const double x = 2.0 * p.eta * p.gamma;
    return std::exp(-z.t() / 4.0) / std::sqrt(kPi * z.modulus()) * std::pow(p.delta / kTwoPi, -x) *
           (riemann_zeta(1.0 + x) + kPi);
}

}  // namespace hyptrace
