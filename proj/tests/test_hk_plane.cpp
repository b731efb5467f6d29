#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <hyptrace/hk_plane.hpp>

using namespace hyptrace;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

// Independent evaluation of the d > 0 formula: substitute u = d + w^2 (a different
// singularity removal from the library's), composite trapezoid on [0, W], Richardson.
double trapezoid_reference(double t, double d) {
    const double W = std::sqrt(std::sqrt(d * d + 60.0 * 4.0 * t) - d) + 1.0;
    auto f = [&](double w) {
        if (w == 0.0) {
            // 2w u e^{..}/sqrt(cosh u - cosh d) -> 2 d e^{-d^2/4t} / sqrt(sinh d)
            return 2.0 * d * std::exp(-d * d / (4.0 * t)) / std::sqrt(std::sinh(d));
        }
        const double u = d + w * w;
        const double gap = 2.0 * std::sinh(0.5 * (u + d)) * std::sinh(0.5 * w * w);
        return 2.0 * w * u * std::exp(-u * u / (4.0 * t)) / std::sqrt(gap);
    };
    auto trap = [&](int n) {
        const double h = W / n;
        double s = 0.5 * (f(0.0) + f(W));
        for (int i = 1; i < n; ++i) s += f(i * h);
        return s * h;
    };
    const double t1 = trap(20000), t2 = trap(40000);
    const double J = t2 + (t2 - t1) / 3.0;
    return std::sqrt(2.0) * std::exp(-t / 4.0) / std::pow(4.0 * kPi * t, 1.5) * J;
}

}  // namespace

TEST_CASE("complex time", "[hk_plane]") {
    const ComplexTime z(1.0, 2.0);
    CHECK(z.eta() == 1.0 / 20.0);
    CHECK(z.modulus() == std::sqrt(5.0));
    CHECK(z.eta() <= 1.0 / (4.0 * z.t()));
    CHECK_FALSE(z.is_real());
    CHECK(z.conj().s() == -2.0);
    CHECK_THROWS_AS(ComplexTime(0.0), DomainError);
    CHECK_THROWS_AS(ComplexTime(-1.0, 1.0), DomainError);
}

TEST_CASE("plane heat kernel against high-precision values", "[hk_plane]") {
    // 30-digit quadrature of the same formulas
    const std::pair<double, double> ref[] = {{0.0, 0.057535755205721975},
                                             {0.5, 0.052997770872884702},
                                             {1.0, 0.041491183957822218},
                                             {2.0, 0.015914115768910426},
                                             {4.0, 0.0004154802256226069}};
    for (auto [d, v] : ref) {
        const cplx k = hk_plane(1.0, d);
        CHECK_THAT(k.real(), WithinRel(v, 1e-12));
        CHECK(k.imag() == 0.0);
    }
    const cplx kc = hk_plane(ComplexTime(1.0, 2.0), 0.7);
    CHECK_THAT(kc.real(), WithinRel(-0.0026504881409634128, 1e-10));
    CHECK_THAT(kc.imag(), WithinRel(-0.023510844031592474, 1e-10));
}

TEST_CASE("continuity across d = 0 and decay in d", "[hk_plane]") {
    CHECK_THAT(hk_plane(1.0, 1e-6).real(), WithinRel(hk_plane(1.0, 0.0).real(), 1e-5));
    double prev = hk_plane(1.0, 0.0).real();
    for (double d : {0.5, 1.0, 2.0, 4.0}) {
        const double k = hk_plane(1.0, d).real();
        CHECK(k < prev);
        CHECK(k > 0.0);
        prev = k;
    }
    CHECK_THROWS_AS(hk_plane(1.0, -0.5), DomainError);
}

TEST_CASE("large time at d = 0 sits under exp(-t/4)/(4 pi t)", "[hk_plane]") {
    double prev = 1.0;
    for (double t : {5.0, 20.0, 80.0}) {
        const double k = hk_plane(t, 0.0).real();
        CHECK(k > 0.0);
        CHECK(k <= std::exp(-t / 4.0) / (4.0 * kPi * t));
        CHECK(k < prev);
        prev = k;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("complex-time envelope", "[hk_plane]") {
    for (double t : {0.5, 1.0})
        for (double s : {0.0, 1.0, 5.0})
            for (double d : {0.0, 1.0, 3.0}) {
                const ComplexTime z(t, s);
                const double lhs = std::abs(hk_plane(z, d));
                const double rhs = complex_bound_reference(z, d);
                if (s == 0.0) CHECK_THAT(rhs, WithinRel(lhs, 1e-14));
                else CHECK(lhs < rhs);
            }
    for (double t : {0.3, 2.0})
        for (double s : {0.0, 0.5}) {
            const double tau = t + s * s / t;
            CHECK(tau >= t);
            CHECK((tau == t) == (s == 0.0));
        }
}

TEST_CASE("semigroup spot check through the spectral integral", "[hk_plane]") {
    for (auto [t1, t2] : {std::pair{0.5, 0.5}, std::pair{1.0, 2.0}}) {
        const double tt = t1 + t2;
        auto f = [tt](double r) { return std::exp(-(0.25 + r * r) * tt) * std::tanh(kPi * r) * r; };
        auto direct = integrate_adaptive(f, 0.0, 40.0, QuadratureConfig{});
        CHECK_THAT(hk_plane(tt, 0.0).real(), WithinRel(direct.value / (2.0 * kPi), 1e-10));
    }
}

TEST_CASE("conjugate symmetry", "[hk_plane]") {
    for (double t : {0.3, 1.0, 3.0})
        for (double s : {0.5, 2.0, 7.0}) {
            const ComplexTime z(t, s);
            for (double d : {0.0, 0.8}) {
                const cplx a = hk_plane(z.conj(), d), b = std::conj(hk_plane(z, d));
                CHECK(std::abs(a - b) <= 1e-13 * std::abs(b));
            }
        }
}

TEST_CASE("substitution agrees with a trapezoid reference", "[hk_plane]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> tl(std::log(0.2), std::log(5.0)), dd(0.05, 4.0);
    for (int i = 0; i < 20; ++i) {
        const double t = std::exp(tl(rng)), d = dd(rng);
        CHECK_THAT(hk_plane(t, d).real(), WithinRel(trapezoid_reference(t, d), 1e-8));
    }
}

TEST_CASE("error estimates are honest under tolerance refinement", "[hk_plane]") {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-6;
    for (double d : {0.0, 0.3, 2.0}) {
        const auto coarse = hk_plane_with_error(ComplexTime(0.7, 1.5), d, cfg);
        const auto fine = hk_plane_with_error(ComplexTime(0.7, 1.5), d, cfg.with_rel_tol(5e-7));
        CHECK(std::abs(coarse.value - fine.value) <= coarse.error_estimate + 1e-16);
    }
}
