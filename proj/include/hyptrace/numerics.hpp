#pragma once

// Quadrature primitives and special functions shared by the trace code.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace hyptrace {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_subdivisions = 4000;
    /// Relative Gaussian mass discarded when a semi-infinite integral is cut off.
    double tail_cutoff_tol = 1e-14;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("QuadratureConfig: rel_tol must be > 0");
        if (!(abs_tol >= 0.0)) throw DomainError("QuadratureConfig: abs_tol must be >= 0");
        if (max_subdivisions < 1) throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
        if (!(tail_cutoff_tol > 0.0 && tail_cutoff_tol <= 1e-6))
            throw DomainError("QuadratureConfig: tail_cutoff_tol must lie in (0, 1e-6]");
    }

    [[nodiscard]] QuadratureConfig with_rel_tol(double r) const {
        QuadratureConfig c = *this;
        c.rel_tol = r;
        return c;
    }
};

template <class V = cplx>
struct IntegralResult {
    V value{};
    double error_estimate = 0.0;
};

/// Non-convergence of an adaptive rule. Carries whatever was accumulated.
class QuadratureFailure : public std::runtime_error {
public:
    QuadratureFailure(const std::string& what, cplx partial, double err)
        : std::runtime_error(what), partial_value(partial), partial_error(err) {}

    /// Rethrow-with-context helper used by callers that sum several integrals.
    [[nodiscard]] QuadratureFailure with_context(const std::string& ctx) const {
        return QuadratureFailure(ctx + ": " + what(), partial_value, partial_error);
    }

    cplx partial_value;
    double partial_error;
};

namespace detail {

// Norms for the value types the integrator understands: double, complex and
// fixed-size arrays of doubles (integrated componentwise on one shared tree).
inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const cplx& v) { return std::abs(v); }
template <std::size_t N>
double norm_of(const std::array<double, N>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline cplx to_complex(double v) { return {v, 0.0}; }
inline cplx to_complex(const cplx& v) { return v; }
template <std::size_t N>
cplx to_complex(const std::array<double, N>& v) {
    if constexpr (N >= 2) return {v[0], v[1]};
    else return {v[0], 0.0};
}

template <class V>
V scaled(const V& v, double s) {
    if constexpr (std::is_same_v<V, double> || std::is_same_v<V, cplx>) {
        return v * s;
    } else {
        V r = v;
        for (auto& x : r) x *= s;
        return r;
    }
}

template <class V>
V added(const V& a, const V& b) {
    if constexpr (std::is_same_v<V, double> || std::is_same_v<V, cplx>) {
        return a + b;
    } else {
        V r = a;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
        return r;
    }
}

template <class V>
V abs_of(const V& v) {
    if constexpr (std::is_same_v<V, double>) {
        return std::abs(v);
    } else if constexpr (std::is_same_v<V, cplx>) {
        return {std::abs(v.real()), std::abs(v.imag())};
    } else {
        V r = v;
        for (auto& x : r) x = std::abs(x);
        return r;
    }
}

template <class V>
bool all_finite(const V& v) {
    if constexpr (std::is_same_v<V, double>) {
        return std::isfinite(v);
    } else if constexpr (std::is_same_v<V, cplx>) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    } else {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Segment {
    double a, b;
    V value;
    double error;
    double abs_value;  // integral of |f|, used for the round-off floor
};

template <class V, class F>
Segment<V> gauss_kronrod_15(F& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<V, 15> fv;
    fv[0] = f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[1 + 2 * j] = f(center - dx);
        fv[2 + 2 * j] = f(center + dx);
    }

    V resk = scaled(fv[0], kWgk[7]);
    V resg = scaled(fv[0], kWg[3]);
    double resabs = kWgk[7] * norm_of(fv[0]);
    for (int j = 0; j < 7; ++j) {
        const V pair = added(fv[1 + 2 * j], fv[2 + 2 * j]);
        resk = added(resk, scaled(pair, kWgk[j]));
        resabs += kWgk[j] * (norm_of(fv[1 + 2 * j]) + norm_of(fv[2 + 2 * j]));
        if (j % 2 == 1) resg = added(resg, scaled(pair, kWg[j / 2]));
    }
    const V mean = scaled(resk, 0.5);
    double resasc = kWgk[7] * norm_of(added(fv[0], scaled(mean, -1.0)));
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (norm_of(added(fv[1 + 2 * j], scaled(mean, -1.0))) +
                             norm_of(added(fv[2 + 2 * j], scaled(mean, -1.0))));
    }

    const double ah = std::abs(half);
    double err = norm_of(added(resk, scaled(resg, -1.0))) * ah;
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);

    return {a, b, scaled(resk, half), err, resabs};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// `breakpoints` seeds the initial partition (points outside (a, b) are ignored).
/// The value type of f may be double, std::complex<double> or std::array<double, N>;
/// all components share one subdivision tree.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg,
                        std::span<const double> breakpoints = {})
    -> IntegralResult<std::decay_t<std::invoke_result_t<F&, double>>> {
    using V = std::decay_t<std::invoke_result_t<F&, double>>;
    using detail::Segment;
    cfg.validate();
    if (!(a < b)) {
        if (a == b) return {V{}, 0.0};
        throw DomainError("integrate_adaptive: requires a < b");
    }

    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Segment<V>> segs;
    segs.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        segs.push_back(detail::gauss_kronrod_15<V>(f, cuts[i], cuts[i + 1]));

    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto totals = [&] {
        V value{};
        double err = 0.0, absv = 0.0;
        for (const auto& s : segs) {
            value = detail::added(value, s.value);
            err += s.error;
            absv += s.abs_value;
        }
        return std::tuple{value, err, absv};
    };

    int splits = 0;
    while (true) {
        auto [value, err, absv] = totals();
        if (!detail::all_finite(value) || !std::isfinite(err)) {
            throw QuadratureFailure("integrate_adaptive: non-finite integrand value",
                                    detail::to_complex(value), err);
        }
        const double target = std::max({cfg.abs_tol, cfg.rel_tol * detail::norm_of(value), 50.0 * eps * absv});
        if (err <= target) return {value, err};
        if (splits >= cfg.max_subdivisions) {
            throw QuadratureFailure("integrate_adaptive: no convergence after " + std::to_string(splits) +
                                        " subdivisions on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                                    detail::to_complex(value), err);
        }
        // Bisect the segment with the largest error; lowest index wins ties.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const Segment<V> s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) || (s.b - s.a) < 4.0 * eps * std::max(std::abs(s.a), std::abs(s.b))) {
            throw QuadratureFailure("integrate_adaptive: interval underflow near x = " + std::to_string(mid),
                                    detail::to_complex(value), err);
        }
        segs[worst] = detail::gauss_kronrod_15<V>(f, s.a, mid);
        segs.push_back(detail::gauss_kronrod_15<V>(f, mid, s.b));
        ++splits;
    }
}

/// Radius U beyond which exp(-eta u^2) has fallen below `tol` relative to its value
/// at `anchor` (u >= anchor >= 0), widened for a polynomial prefactor of degree `poly_degree`.
inline double gaussian_cutoff(double eta, double tol, int poly_degree = 0, double anchor = 0.0) {
    if (!(eta > 0.0)) throw DomainError("gaussian_cutoff: decay rate must be > 0");
    const double L = std::log(1.0 / tol);
    double U = std::sqrt(anchor * anchor + L / eta);
    if (poly_degree > 0) {
        // Solve eta (U^2 - anchor^2) = L + p log U by a few fixed-point sweeps.
        for (int i = 0; i < 4; ++i)
            U = std::sqrt(anchor * anchor + (L + poly_degree * std::log(std::max(U, 1.0))) / eta);
    }
    return U;
}

/// Integral of g over [lower, inf) for an integrand bounded by C exp(-eta u^2) times a
/// polynomial of degree `poly_degree`. The cut-off radius is analytic (gaussian_cutoff)
/// and the discarded-tail bound is added to the reported error.
template <class G>
auto integrate_gaussian_tail(G&& g, double eta, const QuadratureConfig& cfg, int poly_degree = 0,
                             double lower = 0.0, std::span<const double> breakpoints = {})
    -> IntegralResult<std::decay_t<std::invoke_result_t<G&, double>>> {
    if (!(eta > 0.0)) throw DomainError("integrate_gaussian_tail: decay rate eta must be > 0");
    const double U = gaussian_cutoff(eta, cfg.tail_cutoff_tol, poly_degree, lower);
    std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
    // A coarse uniform seed keeps the first Kronrod pass from stepping over features.
    for (int i = 1; i < 8; ++i) cuts.push_back(lower + (U - lower) * i / 8.0);
    auto r = integrate_adaptive(g, lower, U, cfg, cuts);
    // Mills-ratio bound for the discarded Gaussian tail.
    const double gu = detail::norm_of(g(U));
    r.error_estimate += gu / (2.0 * eta * U) * (1.0 + poly_degree / (2.0 * eta * U * U));
    return r;
}

/// arccosh(1 + x) for x >= 0 without cancellation near x = 0.
inline double acosh1p(double x) {
    if (x < 0.0) {
        if (x > -1e-15) x = 0.0;
        else throw DomainError("acosh1p: argument below 1");
    }
    if (x < 1e-8) {
        // sqrt(2x) (1 - x/12 + 3x^2/160)
        return std::sqrt(2.0 * x) * (1.0 - x / 12.0 + 3.0 * x * x / 160.0);
    }
    return std::log1p(x + std::sqrt(x * (2.0 + x)));
}

/// arccosh for arguments >= 1, routed through acosh1p.
inline double acosh_stable(double y) { return acosh1p(y - 1.0); }

/// Riemann zeta function for real s > 1 (Euler-Maclaurin corrected partial sum).
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw DomainError("riemann_zeta: requires s > 1");
    if (s > 60.0) return 1.0 + std::exp2(-s) + std::pow(3.0, -s);

    // B_{2k} / (2k)! for k = 1..10
    static constexpr std::array<double, 10> kBernoulliOverFactorial = {
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
        43867.0 / 5109094217170944000.0,
        -174611.0 / 802857662698291200000.0};

    constexpr int N = 16;
    double sum = 0.0;
    for (int k = N - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);

    const double n = N;
    const double nms = std::pow(n, -s);
    sum += n * nms / (s - 1.0) + 0.5 * nms;

    // sum_k B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    double rising = s;          // s (s+1) ... (s + 2k - 2)
    double power = nms / n;     // N^{-s-1}
    for (int k = 0; k < 10; ++k) {
        const double term = kBernoulliOverFactorial[k] * rising * power;
        sum += term;
        if (std::abs(term) < 1e-17 * sum) break;
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
        power /= n * n;
    }
    return sum;
}

}  // namespace hyptrace
