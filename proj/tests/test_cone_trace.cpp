#include <catch_amalgamated.hpp>

#include <cmath>

#include <hyptrace/cone_trace.hpp>

using namespace hyptrace;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

double relerr(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("truncation helper functions", "[cone_trace]") {
    const ConeParams c(7);
    for (int n : {1, 2, 3}) {
        const TruncationGeometry g(c, n);
        for (double delta : {0.0, 0.3, 5.0})
            CHECK(g.d(delta) == Catch::Approx(g.b(1.0 + 7.0 * delta / kTwoPi)).epsilon(1e-14));
        for (double u : {0.0, 0.1, 3.0}) CHECK(g.c(u) >= 1.0);
        for (double rho : {0.0, 0.4, 2.0}) CHECK(g.a(rho) == Catch::Approx(cone_displacement(c, n, rho)).epsilon(1e-15));
        CHECK_THROWS_AS(g.b(0.5), DomainError);
        // b and c are inverse to each other: b(c(u)) = u
        for (double u : {0.2, 1.5, 6.0}) CHECK_THAT(g.b(g.c(u)), WithinRel(u, 1e-12));
    }
    CHECK(TruncationGeometry(c, 1).d(0.0) == 0.0);
}

TEST_CASE("cone heat kernel", "[cone_trace]") {
    const ComplexTime z(1.0);
    const ConePoint p(0.8, 1.0), p2(1.3, 4.0);

    // one-element isotropy: the plane kernel at the hyperbolic distance
    {
        const double dist = std::acosh(std::cosh(0.8) * std::cosh(1.3) - std::sinh(0.8) * std::sinh(1.3) * std::cos(1.0 - 4.0));
        CHECK_THAT(cone_heat_kernel(ConeParams(1), z, p, p2).value.real(), WithinRel(hk_plane(z, dist).real(), 1e-12));
    }
    // diagonal: the n = 0 term is K_H(z, 0) and the others are displacement terms
    for (int q : {2, 3, 6}) {
        const ConeParams c(q);
        const double lhs = cone_heat_kernel(c, z, p, p).value.real() - hk_plane(z, 0.0).real();
        double rhs = 0.0;
        for (int n = 1; n < q; ++n) rhs += hk_plane(z, cone_displacement(c, n, p.rho)).real();
        CHECK_THAT(lhs, WithinRel(rhs, 1e-13));
        CHECK(lhs > 0.0);
    }
    // symmetric in its two points
    const auto a = cone_heat_kernel(ConeParams(5), ComplexTime(0.5, 1.0), p, p2).value;
    const auto b = cone_heat_kernel(ConeParams(5), ComplexTime(0.5, 1.0), p2, p).value;
    CHECK(relerr(a, b) < 1e-12);
}

TEST_CASE("elliptic cone trace", "[cone_trace]") {
    CHECK(elliptic_cone_trace(ConeParams(1), 1.0).value == cplx(0.0));
    CHECK(elliptic_cone_trace_hejhal(ConeParams(1), 1.0).value == 0.0);

    // 30-digit quadrature of the same formula
    CHECK_THAT(elliptic_cone_trace(ConeParams(3), 1.0).value.real(), WithinRel(0.1351045049674086, 1e-12));
    CHECK_THAT(elliptic_cone_trace(ConeParams(2), 1.0).value.real(), WithinRel(0.081235824415608648, 1e-12));
    const cplx e5 = elliptic_cone_trace(ConeParams(5), ComplexTime(1.0, 2.0)).value;
    CHECK(relerr(e5, {0.12652408873139255, -0.13325147352642087}) < 1e-11);

    // q = 2 equals the untruncated truncated trace
    CHECK_THAT(elliptic_cone_trace(ConeParams(2), 1.0).value.real(),
               WithinRel(truncated_cone_trace(ConeParams(2), 0.0, 1.0).value.real(), 1e-13));

    // n and q - n summands are bitwise equal
    for (int q : {5, 8, 13})
        for (int n = 1; n < q; ++n) {
            const auto a = elliptic_cone_summand(ConeParams(q), n, ComplexTime(0.7, 0.4));
            const auto b = elliptic_cone_summand(ConeParams(q), q - n, ComplexTime(0.7, 0.4));
            CHECK(a.value == b.value);
        }

    // pairing is an optimisation only
    ConeTraceConfig unpaired;
    unpaired.pair_symmetric = false;
    for (int q : {6, 9}) {
        const auto a = elliptic_cone_trace(ConeParams(q), ComplexTime(1.0, 1.0));
        const auto b = elliptic_cone_trace(ConeParams(q), ComplexTime(1.0, 1.0), unpaired);
        CHECK(relerr(a.value, b.value) < 1e-14);
    }
}

TEST_CASE("single-term exponential/hyperbolic identity", "[cone_trace]") {
    const ConeParams c(3);
    const double lhs = hejhal_summand(c, 1, 1.0).value / (2.0 * std::sin(kPi / 3.0));
    const double rhs = elliptic_cone_summand(c, 1, 1.0).value.real() / std::sqrt(16.0 * kPi);
    CHECK_THAT(lhs, WithinRel(rhs, 1e-8));
}

TEST_CASE("both elliptic representations agree", "[cone_trace]") {
    for (int q = 2; q <= 12; ++q)
        for (double t : {0.1, 1.0, 10.0}) {
            const auto a = elliptic_cone_trace(ConeParams(q), t);
            const auto b = elliptic_cone_trace_hejhal(ConeParams(q), t);
            CHECK_THAT(a.value.real(), WithinRel(b.value, 1e-8));
            CHECK(std::abs(a.value.imag()) <= 1e-12 * a.value.real());
            CHECK(a.value.real() > 0.0);
        }
}

TEST_CASE("truncated trace", "[cone_trace]") {
    for (int q : {3, 7, 50})
        for (cplx z : {cplx(1.0, 0.0), cplx(0.3, 2.0)}) {
            const ComplexTime zt(z.real(), z.imag());
            CHECK(relerr(truncated_cone_trace(ConeParams(q), 0.0, zt).value, elliptic_cone_trace(ConeParams(q), zt).value) < 1e-9);
        }

    for (auto [q, n, delta] : {std::tuple{5, 1, 0.3}, std::tuple{7, 3, 1.0}}) {
        CHECK_THAT(truncated_f_prime_mass(ConeParams(q), n, delta).value, WithinRel(kPi / 2.0, 1e-9));
        const double d = TruncationGeometry(ConeParams(q), n).d(delta);
        for (double u : {d + 1e-9, d + 0.5, d + 10.0}) CHECK(truncated_f_prime(ConeParams(q), n, delta, u) > 0.0);
        CHECK_THROWS_AS(truncated_f_prime(ConeParams(q), n, delta, d), DomainError);
    }

    for (int q : {3, 50}) {
        double prev = 1.0;
        for (double delta : {1.0, 10.0, 100.0, 1000.0}) {
            const double v = std::abs(truncated_cone_trace(ConeParams(q), delta, 1.0).value);
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 1e-8);
    }
    CHECK_THROWS_AS(truncated_cone_trace(ConeParams(3), -1.0, 1.0), DomainError);
    CHECK(truncated_cone_trace(ConeParams(1), 0.5, 1.0).value == cplx(0.0));
}

TEST_CASE("closed form against the periodised-kernel quadrature", "[cone_trace]") {
    struct Case { int q; double delta; cplx z; double rel; };
    for (auto c : {Case{3, 0.0, {1, 0}, 1e-6}, Case{7, 0.5, {1, 0}, 1e-6}, Case{5, 0.3, {1, 2}, 1e-5}}) {
        const ComplexTime z(c.z.real(), c.z.imag());
        const auto a = truncated_cone_trace(ConeParams(c.q), c.delta, z);
        const auto o = truncated_cone_trace_oracle(ConeParams(c.q), c.delta, z);
        CHECK(relerr(a.value, o.value) < c.rel);
        CHECK(std::abs(a.value - o.value) <= a.error_estimate + o.error_estimate);
    }
}

TEST_CASE("explicit bound", "[cone_trace]") {
    // t = 1, s = 0, delta = 2 pi: eta = 1/4, gamma = log 2, the power factor is 1
    const ComplexTime z(1.0);
    const DegenerationBoundParams p(kTwoPi, z);
    CHECK(p.eta == 0.25);
    CHECK_THAT(p.gamma, WithinRel(std::log(2.0), 1e-15));
    const double assembled = std::exp(-0.25) / std::sqrt(kPi) * (riemann_zeta(1.0 + std::log(2.0) / 2.0) + kPi);
    CHECK_THAT(degeneration_bound(p, z), WithinRel(assembled, 1e-14));
    CHECK_THAT(degeneration_bound(p, z), WithinRel(2.912654376662188, 1e-11));
    CHECK_THROWS_AS(DegenerationBoundParams(0.0, z), DomainError);

    int violations = 0;
    for (int q : {3, 10, 100})
        for (double delta : {0.5, 1.0, 2.0})
            for (double t : {0.5, 1.0})
                for (double s : {0.0, 1.0, 5.0}) {
                    const ComplexTime zz(t, s);
                    const double v = std::abs(truncated_cone_trace(ConeParams(q), delta, zz).value);
                    violations += !(v <= degeneration_bound(DegenerationBoundParams(delta, zz), zz));
                }
    CHECK(violations == 0);

    for (double s : {0.0, 3.0}) {
        const ComplexTime zz(1.0, s);
        double prev = std::numeric_limits<double>::infinity();
        for (double delta : {7.0, 10.0, 30.0, 100.0, 1000.0}) {
            const double b = degeneration_bound(DegenerationBoundParams(delta, zz), zz);
            CHECK(b < prev);
            prev = b;
        }
    }
}

TEST_CASE("real-time values are real", "[cone_trace]") {
    for (int q : {3, 8})
        for (double delta : {0.0, 0.7}) {
            const auto v = truncated_cone_trace(ConeParams(q), delta, 0.6).value;
            CHECK(v.real() > 0.0);
            CHECK(std::abs(v.imag()) <= 1e-12 * v.real());
        }
}
