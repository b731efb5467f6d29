#pragma once

// Heat traces of a finite-volume hyperbolic surface (orbifold) assembled from its
// signature and a truncated primitive length spectrum: the hyperbolic, elliptic,
// degenerating, identity, standard and reduced traces, and the geometric and compact
// spectral sides of the Selberg trace formula for a transform pair (H, H^).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cone_trace.hpp"
#include "geometry.hpp"
#include "hk_plane.hpp"
#include "numerics.hpp"

namespace hyptrace {

/// Whether a class and its inverse are counted separately (the default: the trace
/// sums over all inconjugate primitive classes) or merged into one entry.
enum class InverseConvention { distinct, identified };

inline const char* to_string(InverseConvention c) { return c == InverseConvention::distinct ? "distinct" : "identified"; }

inline InverseConvention parse_inverse_convention(const std::string& s) {
    if (s == "distinct") return InverseConvention::distinct;
    if (s == "identified") return InverseConvention::identified;
    throw DomainError("unknown inverse-class convention '" + s + "' (expected distinct|identified)");
}

struct LengthEntry {
    double length = 0.0;
    long long multiplicity = 0;

    friend bool operator==(const LengthEntry&, const LengthEntry&) = default;
};

/// Primitive closed-geodesic lengths with multiplicities. Every primitive class of length
/// <= completeness_radius is present; longer ones may be missing.
struct LengthSpectrum {
    std::vector<LengthEntry> entries;
    double completeness_radius = 0.0;
    /// Metadata only: multiplicities are already counted under this convention.
    InverseConvention convention = InverseConvention::distinct;

    void validate() const {
        if (!(completeness_radius >= 0.0)) throw DomainError("LengthSpectrum: completeness_radius must be >= 0");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!(entries[i].length > 0.0) || !std::isfinite(entries[i].length))
                throw DomainError("LengthSpectrum: lengths must be finite and > 0");
            if (entries[i].multiplicity < 1) throw DomainError("LengthSpectrum: multiplicities must be >= 1");
            if (i > 0 && !(entries[i - 1].length < entries[i].length))
                throw DomainError("LengthSpectrum: lengths must be strictly ascending");
        }
    }

    /// Entries with length <= radius, and that radius as the new completeness radius.
    [[nodiscard]] LengthSpectrum truncated(double radius) const {
        LengthSpectrum out;
        out.convention = convention;
        out.completeness_radius = std::min(radius, completeness_radius);
        for (const auto& e : entries)
            if (e.length <= radius) out.entries.push_back(e);
        return out;
    }

    friend bool operator==(const LengthSpectrum&, const LengthSpectrum&) = default;
};

struct SurfaceData {
    SurfaceSignature signature;
    LengthSpectrum spectrum;
    /// Cone orders whose elliptic contribution is subtracted in the reduced trace.
    std::vector<int> degenerating_orders;

    void validate() const {
        signature.validate();
        spectrum.validate();
        if (!remaining_orders_impl().second)
            throw DomainError("SurfaceData: degenerating orders are not a sub-multiset of the cone orders");
    }

    [[nodiscard]] double volume() const { return orbifold_volume(signature); }

    /// cone_orders minus degenerating_orders, as multisets, in cone_orders order.
    [[nodiscard]] std::vector<int> remaining_orders() const {
        auto [rest, ok] = remaining_orders_impl();
        if (!ok) throw DomainError("SurfaceData: degenerating orders are not a sub-multiset of the cone orders");
        return rest;
    }

    friend bool operator==(const SurfaceData&, const SurfaceData&) = default;

private:
    [[nodiscard]] std::pair<std::vector<int>, bool> remaining_orders_impl() const {
        std::vector<int> rest = signature.cone_orders;
        for (int q : degenerating_orders) {
            auto it = std::find(rest.begin(), rest.end(), q);
            if (it == rest.end()) return {{}, false};
            rest.erase(it);
        }
        return {rest, true};
    }
};

struct TraceValue {
    cplx value{};
    /// Quadrature and series-truncation error.
    double error_estimate = 0.0;
    /// Bound on the contribution of classes beyond the completeness radius.
    double completeness_deficit = 0.0;

    [[nodiscard]] double total_uncertainty() const { return error_estimate + completeness_deficit; }

    TraceValue& operator+=(const TraceValue& o) {
        value += o.value;
        error_estimate += o.error_estimate;
        completeness_deficit += o.completeness_deficit;
        return *this;
    }
    TraceValue& operator-=(const TraceValue& o) {
        value -= o.value;
        error_estimate += o.error_estimate;
        completeness_deficit += o.completeness_deficit;
        return *this;
    }
    friend TraceValue operator+(TraceValue a, const TraceValue& b) { return a += b; }
    friend TraceValue operator-(TraceValue a, const TraceValue& b) { return a -= b; }
};

/// A transform pair for the trace formula. H is evaluated on the real line and on the
/// segment [0, i/2]; H_hat is its Fourier transform on the real line. Both must decay at
/// least like a Gaussian with the declared rates (used to cut off the integrals and
/// series); admissibility is the caller's responsibility.
struct TestFunctionPair {
    std::function<cplx(cplx)> H;
    std::function<cplx(double)> H_hat;
    double r_decay = 0.0;
    double u_decay = 0.0;
    std::string note;

    [[nodiscard]] TestFunctionPair scaled(cplx c) const {
        TestFunctionPair p = *this;
        auto h = H;
        auto hh = H_hat;
        p.H = [h, c](cplx r) { return c * h(r); };
        p.H_hat = [hh, c](double u) { return c * hh(u); };
        return p;
    }

    /// H(r) = exp(-z r^2), H^(u) = (4 pi z)^{-1/2} exp(-u^2 / 4z).
    static TestFunctionPair gaussian(const ComplexTime& z) {
        const cplx zz = z.z();
        const cplx c = 1.0 / std::sqrt(4.0 * kPi * zz);
        const cplx inv4z = 1.0 / (4.0 * zz);
        return {[zz](cplx r) { return std::exp(-zz * r * r); },
                [c, inv4z](double u) { return c * std::exp(-u * u * inv4z); }, z.t(), z.eta(),
                "gaussian exp(-z r^2)"};
    }

    /// The Gaussian pair times exp(-z/4): H(r) = exp(-z (r^2 + 1/4)). With this pair the
    /// geometric side is the standard heat trace itself, since lambda = 1/4 + r^2.
    static TestFunctionPair heat(const ComplexTime& z) {
        auto p = gaussian(z).scaled(std::exp(-z.z() / 4.0));
        p.note = "heat exp(-z (r^2 + 1/4))";
        return p;
    }
};

struct HyperbolicTraceConfig {
    QuadratureConfig quad{};
    /// Hard cap on the iterate sum n = 1..n_max per class.
    int n_max = 10000;
    /// A in the counting bound #{classes with length <= x} <= A e^x, used for the deficit.
    double growth_constant = 1.0;
};

namespace detail {

/// l / sinh(x) without overflow for large x.
inline double over_sinh(double l, double x) {
    if (x > 20.0) return 2.0 * l * std::exp(-x) / (-std::expm1(-2.0 * x));
    return l / std::sinh(x);
}

/// Sum over n >= 1 of w(n) with |w(n+1)| <= |w(n)| exp(-rate l^2 (2n+1)), stopped once the
/// remaining tail bound is below tol * |partial|. Returns the sum and the tail bound.
template <class Term>
IntegralResult<cplx> iterate_series(Term&& term, double l, double rate, double tol, int n_max) {
    IntegralResult<cplx> r;
    for (int n = 1; n <= n_max; ++n) {
        const cplx w = term(n);
        r.value += w;
        const double ratio = std::exp(-rate * l * l * (2.0 * n + 1.0));
        const double tail = std::abs(w) * ratio / (1.0 - std::min(ratio, 0.5));
        if (tail <= tol * std::abs(r.value) || tail == 0.0) {
            r.error_estimate = tail;
            return r;
        }
        if (n == n_max) r.error_estimate = tail;
    }
    return r;
}

/// A * (e^R g(R) + int_R^inf e^l g(l) dl), g(l) = 2 l / sinh(l/2) exp(-eta l^2), which bounds
/// sum over missing classes of sum_n l / sinh(n l/2) exp(-eta (n l)^2) when the counting
/// function grows at most like A e^l.
inline double completeness_deficit_sum(double R, double eta, double A, const QuadratureConfig& cfg) {
    if (A == 0.0 || std::isinf(R)) return 0.0;
    auto g = [eta](double l) { return 2.0 * over_sinh(l, 0.5 * l) * std::exp(-eta * l * l); };
    auto eg = [eta](double l) {
        if (l == 0.0) return 4.0;
        // e^l * 2l/sinh(l/2) = 4l e^{l/2} / (1 - e^{-l})
        return 4.0 * l * std::exp(0.5 * l - eta * l * l) / (-std::expm1(-l));
    };
    const double peak = std::max(R, 1.0 / (4.0 * eta));
    const double U = peak + std::sqrt(60.0 / eta);
    const double boundary = R == 0.0 ? 4.0 : std::exp(R) * g(R);
    auto r = integrate_adaptive(eg, R, U, cfg.with_rel_tol(1e-6), std::array{peak});
    return A * (boundary + r.value + r.error_estimate);
}

/// exp(-a r) / (1 + exp(-2 pi r)) evaluated without overflow on either side.
inline double elliptic_weight(double r, double a) {
    if (r >= 0.0) return std::exp(-a * r) / (1.0 + std::exp(-kTwoPi * r));
    return std::exp((kTwoPi - a) * r) / (1.0 + std::exp(kTwoPi * r));
}

}  // namespace detail

/// (e^{-z/4} / sqrt(16 pi z)) sum_classes mult sum_{n>=1} l / sinh(n l/2) exp(-(n l)^2 / 4z).
/// At complex z the real-time formula is used verbatim.
inline TraceValue hyperbolic_trace(const LengthSpectrum& spec, const ComplexTime& z,
                                   const HyperbolicTraceConfig& cfg = {}) {
    spec.validate();
    TraceValue out;
    if (spec.entries.empty()) return out;
    const cplx zz = z.z();
    const cplx inv4z = 1.0 / (4.0 * zz);
    const double eta = z.eta();
    cplx sum = 0.0;
    double err = 0.0;
    for (const auto& e : spec.entries) {
        const double l = e.length;
        auto term = [&](int n) -> cplx {
            const double nl = n * l;
            return detail::over_sinh(l, 0.5 * nl) * std::exp(-nl * nl * inv4z);
        };
        auto s = detail::iterate_series(term, l, eta, cfg.quad.tail_cutoff_tol, cfg.n_max);
        sum += static_cast<double>(e.multiplicity) * s.value;
        err += static_cast<double>(e.multiplicity) * s.error_estimate;
    }
    const cplx pref = std::exp(-zz / 4.0) / std::sqrt(16.0 * kPi * zz);
    out.value = pref * sum;
    out.error_estimate = std::abs(pref) * err + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(out.value);
    out.completeness_deficit =
        std::abs(pref) * detail::completeness_deficit_sum(spec.completeness_radius, eta, cfg.growth_constant, cfg.quad);
    return out;
}

/// Sum of the single-cone elliptic traces over `orders`, in the given order.
inline TraceValue elliptic_trace(const std::vector<int>& orders, const ComplexTime& z,
                                 const ConeTraceConfig& cfg = {}) {
    TraceValue out;
    for (int q : orders) {
        if (q < 2) throw DomainError("elliptic_trace: cone orders must be >= 2");
        auto r = elliptic_cone_trace(ConeParams(q), z, cfg);
        out.value += r.value;
        out.error_estimate += r.error_estimate;
    }
    return out;
}

/// Elliptic trace of the cones flagged as degenerating.
inline TraceValue degenerating_trace(const SurfaceData& s, const ComplexTime& z, const ConeTraceConfig& cfg = {}) {
    s.validate();
    return elliptic_trace(s.degenerating_orders, z, cfg);
}

/// vol * K_H(z, 0).
inline TraceValue identity_term(double volume, const ComplexTime& z, const QuadratureConfig& cfg = {}) {
    if (!(volume > 0.0)) throw DomainError("identity_term: volume must be > 0");
    auto k = hk_plane_with_error(z, 0.0, cfg);
    return {volume * k.value, volume * k.error_estimate, 0.0};
}

/// (vol / 4 pi) int_R exp(-(r^2 + 1/4) z) tanh(pi r) r dr, integrated over the whole line.
inline TraceValue identity_term_geometric(double volume, const ComplexTime& z, const QuadratureConfig& cfg = {}) {
    if (!(volume > 0.0)) throw DomainError("identity_term_geometric: volume must be > 0");
    const cplx zz = z.z();
    auto f = [&](double r) -> cplx { return std::exp(-(r * r + 0.25) * zz) * std::tanh(kPi * r) * r; };
    const double U = gaussian_cutoff(z.t(), cfg.tail_cutoff_tol, 1);
    auto res = integrate_adaptive(f, -U, U, cfg, std::array{-0.5 * U, 0.0, 0.5 * U});
    const double tail = 2.0 * std::abs(f(U)) / (2.0 * z.t() * U) * (1.0 + 1.0 / (2.0 * z.t() * U * U));
    const double c = volume / (4.0 * kPi);
    return {c * res.value, c * (res.error_estimate + tail), 0.0};
}

struct StandardTraceBreakdown {
    TraceValue identity;
    TraceValue hyperbolic;
    TraceValue elliptic;
    TraceValue total;
};

struct SurfaceTraceConfig {
    HyperbolicTraceConfig hyperbolic{};
    ConeTraceConfig cone{};
};

/// HTr + ETr + vol K_H(z, 0), with the three components kept.
inline StandardTraceBreakdown standard_trace_breakdown(const SurfaceData& s, const ComplexTime& z,
                                                       const SurfaceTraceConfig& cfg = {}) {
    s.validate();
    StandardTraceBreakdown b;
    b.identity = identity_term(s.volume(), z, cfg.hyperbolic.quad);
    b.hyperbolic = hyperbolic_trace(s.spectrum, z, cfg.hyperbolic);
    b.elliptic = elliptic_trace(s.signature.cone_orders, z, cfg.cone);
    b.total = b.hyperbolic + b.elliptic + b.identity;
    return b;
}

inline TraceValue standard_trace(const SurfaceData& s, const ComplexTime& z, const SurfaceTraceConfig& cfg = {}) {
    return standard_trace_breakdown(s, z, cfg).total;
}

/// HTr + ETr - DTr. The degenerating cones are removed from the order list before the
/// elliptic sum, so their contribution cancels exactly rather than by subtraction.
inline TraceValue reduced_trace(const SurfaceData& s, const ComplexTime& z, const SurfaceTraceConfig& cfg = {}) {
    s.validate();
    return hyperbolic_trace(s.spectrum, z, cfg.hyperbolic) + elliptic_trace(s.remaining_orders(), z, cfg.cone);
}

/// Geometric side of the compact trace formula for the pair (H, H^):
///   (vol/4pi) int H(r) tanh(pi r) r dr
///   + sum_classes mult sum_n l / (2 sinh(n l/2)) H^(n l)
///   + sum_cones sum_{n=1}^{q-1} (1 / (2 q sin(n pi/q))) int H(r) exp(-2 pi n r/q) / (1 + exp(-2 pi r)) dr
inline TraceValue stf_geometric_side(const SurfaceData& s, const TestFunctionPair& pair,
                                     const SurfaceTraceConfig& cfg = {}) {
    s.validate();
    if (!(pair.r_decay > 0.0) || !(pair.u_decay > 0.0))
        throw DomainError("stf_geometric_side: test pair must declare positive decay rates");
    const QuadratureConfig& qc = cfg.hyperbolic.quad;
    const double U = gaussian_cutoff(pair.r_decay, qc.tail_cutoff_tol, 1);
    const std::array cuts{-0.5 * U, 0.0, 0.5 * U};
    TraceValue out;

    try {
        auto f = [&](double r) -> cplx { return pair.H(r) * std::tanh(kPi * r) * r; };
        auto res = integrate_adaptive(f, -U, U, qc, cuts);
        const double c = s.volume() / (4.0 * kPi);
        out.value += c * res.value;
        out.error_estimate += c * (res.error_estimate + std::abs(f(U)) + std::abs(f(-U)));
    } catch (const QuadratureFailure& fail) {
        throw fail.with_context("stf_geometric_side: identity term");
    }

    {
        cplx sum = 0.0;
        double err = 0.0;
        for (const auto& e : s.spectrum.entries) {
            const double l = e.length;
            auto term = [&](int n) -> cplx { return 0.5 * detail::over_sinh(l, 0.5 * n * l) * pair.H_hat(n * l); };
            auto r = detail::iterate_series(term, l, pair.u_decay, qc.tail_cutoff_tol, cfg.hyperbolic.n_max);
            sum += static_cast<double>(e.multiplicity) * r.value;
            err += static_cast<double>(e.multiplicity) * r.error_estimate;
        }
        out.value += sum;
        out.error_estimate += err;
        // H^ is normalised like the heat pair; the deficit uses the same counting bound.
        out.completeness_deficit += 0.5 * std::abs(pair.H_hat(0.0)) *
                                    detail::completeness_deficit_sum(s.spectrum.completeness_radius, pair.u_decay,
                                                                     cfg.hyperbolic.growth_constant, qc);
    }

    for (int q : s.signature.cone_orders) {
        const ConeParams cone(q);
        for (int n = 1; n < q; ++n) {
            const double a = kTwoPi * n / q;
            auto f = [&](double r) -> cplx { return pair.H(r) * detail::elliptic_weight(r, a); };
            try {
                auto res = integrate_adaptive(f, -U, U, qc, cuts);
                const double c = 1.0 / (2.0 * q * cone.sin_ratio(n));
                out.value += c * res.value;
                out.error_estimate += c * (res.error_estimate + std::abs(f(U)) + std::abs(f(-U)));
            } catch (const QuadratureFailure& fail) {
                throw fail.with_context("stf_geometric_side: elliptic term q=" + std::to_string(q) +
                                        " n=" + std::to_string(n));
            }
        }
    }
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
        throw QuadratureFailure("stf_geometric_side: non-finite value", out.value, out.error_estimate);
    return out;
}

/// r with lambda = 1/4 + r^2: sqrt(lambda - 1/4) on the real axis, i sqrt(1/4 - lambda) for small eigenvalues.
inline cplx spectral_parameter(double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("spectral_parameter: eigenvalues must be >= 0");
    if (lambda >= 0.25) return {std::sqrt(lambda - 0.25), 0.0};
    return {0.0, std::sqrt(0.25 - lambda)};
}

/// sum_n H(r_n) over the supplied Laplace eigenvalues.
inline cplx stf_spectral_side_compact(const std::vector<double>& eigenvalues, const TestFunctionPair& pair) {
    cplx sum = 0.0;
    for (double lambda : eigenvalues) sum += pair.H(spectral_parameter(lambda));
    return sum;
}

}  // namespace hyptrace
