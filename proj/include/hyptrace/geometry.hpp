#pragma once

// Metric formulas for hyperbolic cones C_q, their truncations C_{q,eps},
// cusps, and the change of coordinates that turns a cone into a cusp.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace hyptrace {

/// Cone of angle 2 pi / q. q = 1 is admitted as the trivial cone (the plane itself),
/// which makes every elliptic sum over n = 1..q-1 empty.
class ConeParams {
public:
    explicit ConeParams(int q) : q_(q) {
        if (q < 1) throw DomainError("ConeParams: order q must be >= 1");
    }
    [[nodiscard]] int q() const noexcept { return q_; }
    [[nodiscard]] double angle() const noexcept { return kTwoPi / q_; }

    /// sin(pi n / q) with n reduced mod q before the sine is taken.
    [[nodiscard]] double sin_ratio(long long n) const noexcept {
        long long r = n % q_;
        if (r < 0) r += q_;
        // Use the smaller of r and q - r so the argument stays in [0, pi/2].
        const long long m = std::min(r, q_ - r);
        return std::sin(kPi * static_cast<double>(m) / q_);
    }

    friend bool operator==(const ConeParams&, const ConeParams&) = default;

private:
    int q_;
};

struct ConePoint {
    double rho = 0.0;
    double theta = 0.0;

    ConePoint() = default;
    ConePoint(double r, double th) : rho(r), theta(th) {
        if (!(r >= 0.0)) throw DomainError("ConePoint: rho must be >= 0");
        if (!(th >= 0.0 && th < kTwoPi)) throw DomainError("ConePoint: theta must lie in [0, 2pi)");
    }
};

struct TruncatedConeMetrics {
    double radius = 0.0;
    double volume = 0.0;
    double boundary_length = 0.0;
};

struct SurfaceSignature {
    int genus = 0;
    int cusps = 0;
    std::vector<int> cone_orders;

    /// 2 - 2g - p - sum(1 - 1/q_i); negative for hyperbolic signatures.
    [[nodiscard]] double euler_characteristic() const {
        double chi = 2.0 - 2.0 * genus - cusps;
        for (int q : cone_orders) chi -= 1.0 - 1.0 / q;
        return chi;
    }

    void validate() const {
        if (genus < 0) throw DomainError("SurfaceSignature: genus must be >= 0");
        if (cusps < 0) throw DomainError("SurfaceSignature: cusp count must be >= 0");
        for (int q : cone_orders)
            if (q < 2) throw DomainError("SurfaceSignature: cone orders must be >= 2");
        if (!(euler_characteristic() < 0.0)) throw DomainError("SurfaceSignature: signature is not hyperbolic");
    }

    friend bool operator==(const SurfaceSignature&, const SurfaceSignature&) = default;
};

/// Length of the meridian circle at distance rho from the apex: (2 pi / q) sinh(rho).
inline double meridian_length(const ConeParams& cone, double rho) {
    if (!(rho >= 0.0)) throw DomainError("meridian_length: rho must be >= 0");
    return cone.angle() * std::sinh(rho);
}

/// Displacement of the point at distance rho under the n-th power of the cone rotation:
/// cosh d = 1 + 2 sin^2(pi n / q) sinh^2(rho).
inline double cone_displacement(const ConeParams& cone, long long n, double rho) {
    if (!(rho >= 0.0)) throw DomainError("cone_displacement: rho must be >= 0");
    const double s = cone.sin_ratio(n);
    const double sh = std::sinh(rho);
    return acosh1p(2.0 * s * s * sh * sh);
}

/// C_{q,eps}: radius arccosh(1 + eps q / 2pi), volume eps, boundary sqrt(4 pi eps / q + eps^2).
inline TruncatedConeMetrics truncated_cone_metrics(const ConeParams& cone, double eps) {
    if (!(eps > 0.0)) throw DomainError("truncated_cone_metrics: eps must be > 0");
    const double q = cone.q();
    TruncatedConeMetrics m;
    m.radius = acosh1p(eps * q / kTwoPi);
    m.volume = eps;
    m.boundary_length = std::sqrt(4.0 * kPi * eps / q + eps * eps);
    return m;
}

/// Geodesic distance between the boundaries of C_{q,eps1} and C_{q,eps2}.
inline double nested_boundary_distance(const ConeParams& cone, double eps1, double eps2) {
    if (!(eps1 > 0.0 && eps1 <= eps2))
        throw DomainError("nested_boundary_distance: requires 0 < eps1 <= eps2");
    const double q = cone.q();
    auto g = [q](double e) { return e * q + kTwoPi + std::sqrt(e * q * (4.0 * kPi + e * q)); };
    return std::log(g(eps2) / g(eps1));
}

/// C_{inf,eps}: volume and boundary length eps/2. The radius field holds the boundary
/// horocycle height 2 eps (not a geodesic distance).
inline TruncatedConeMetrics cusp_truncated_metrics(double eps) {
    if (!(eps > 0.0)) throw DomainError("cusp_truncated_metrics: eps must be > 0");
    return {2.0 * eps, 0.5 * eps, 0.5 * eps};
}

/// Thrown when the apex (rho = 0) is sent to the cylinder end y = infinity.
class ApexAtInfinity : public DomainError {
public:
    ApexAtInfinity() : DomainError("cone_to_cusp_coords: apex maps to y = infinity") {}
};

struct CylinderPoint {
    double x;
    double y;
};

/// theta = 2 pi x, rho = 2 artanh(exp(-alpha y)), alpha = 2 pi / q.
inline CylinderPoint cone_to_cusp_coords(const ConeParams& cone, const ConePoint& p) {
    if (p.rho == 0.0) throw ApexAtInfinity();
    if (!(p.rho > 0.0)) throw DomainError("cone_to_cusp_coords: rho must be > 0");
    const double alpha = cone.angle();
    const double e = std::exp(-p.rho);
    // log tanh(rho/2) = log1p(-e) - log1p(e)
    const double log_tanh = std::log1p(-e) - std::log1p(e);
    return {p.theta / kTwoPi, -log_tanh / alpha};
}

/// Inverse of cone_to_cusp_coords.
inline ConePoint cusp_to_cone_coords(const ConeParams& cone, const CylinderPoint& c) {
    if (!(c.y > 0.0)) throw DomainError("cusp_to_cone_coords: y must be > 0");
    if (!(c.x >= 0.0 && c.x < 1.0)) throw DomainError("cusp_to_cone_coords: x must lie in [0, 1)");
    const double alpha = cone.angle();
    const double w = std::exp(-alpha * c.y);
    const double one_minus_w = -std::expm1(-alpha * c.y);
    // 2 artanh(w) = log((1 + w) / (1 - w))
    const double rho = std::log((1.0 + w) / one_minus_w);
    double theta = kTwoPi * c.x;
    if (theta >= kTwoPi) theta = std::nextafter(kTwoPi, 0.0);
    return {rho, theta};
}

/// Conformal factor alpha^{-2} sinh^2(alpha y) of the cone metric in cylinder coordinates;
/// tends to the cusp factor y^2 as alpha -> 0.
inline double cone_conformal_factor(double alpha, double y) {
    if (alpha == 0.0) return y * y;
    const double s = std::sinh(alpha * y) / alpha;
    return s * s;
}

/// Gauss-Bonnet: 2 pi (2g - 2 + p + sum(1 - 1/q_i)).
inline double orbifold_volume(const SurfaceSignature& sig) {
    sig.validate();
    return -kTwoPi * sig.euler_characteristic();
}

}  // namespace hyptrace
