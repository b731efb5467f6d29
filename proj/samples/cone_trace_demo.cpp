// Elliptic trace of a few cones in both forms, and the truncated trace against its bound.

#include <cstdio>

#include <hyptrace/cone_trace.hpp>

int main() {
    using namespace hyptrace;
    std::printf("%4s %6s %22s %22s\n", "q", "t", "cosh/sinh^2 form", "exponential form");
    for (int q : {2, 3, 7}) {
        for (double t : {0.1, 1.0}) {
            const ConeParams cone(q);
            const auto a = elliptic_cone_trace(cone, t);
            const auto b = elliptic_cone_trace_hejhal(cone, t);
            std::printf("%4d %6.2f %22.16f %22.16f\n", q, t, a.value.real(), b.value);
        }
    }

    const ComplexTime z(1.0, 2.0);
    std::printf("\nz = 1 + 2i\n%4s %6s %14s %14s\n", "q", "delta", "|I_{q,delta}|", "bound");
    for (int q : {3, 100}) {
        for (double delta : {0.5, 2.0, 20.0}) {
            const auto I = truncated_cone_trace(ConeParams(q), delta, z);
            const double b = degeneration_bound(DegenerationBoundParams(delta, z), z);
            std::printf("%4d %6.2f %14.6e %14.6e\n", q, delta, std::abs(I.value), b);
        }
    }
}
