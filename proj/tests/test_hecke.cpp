#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <hyptrace/hecke.hpp>

using namespace hyptrace;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

// Independent count for PSL(2,Z): every hyperbolic class has a unique necklace over the
// positive generators L = [[1,0],[1,1]], R = [[1,1],[0,1]] using both letters; primitive
// classes are the Lyndon words. Returns the number of primitive classes per trace.
std::map<long, long> psl2z_classes_by_trace(long max_trace) {
    using M = Mat2<long>;
    const M L{1, 0, 1, 1}, R{1, 1, 0, 1};
    std::map<long, long> out;
    std::vector<int> a(1, 0);
    // FKM over {0 = L, 1 = R}; the trace of a prefix bounds that of every extension.
    auto rec = [&](auto&& self, std::size_t t, std::size_t p, const M& P) -> void {
        if (a.size() <= t) a.resize(t + 1);
        for (int c = (t > 1 ? a[t - p] : 0); c <= 1; ++c) {
            a[t] = c;
            const M Q = P * (c == 0 ? L : R);
            if (Q.trace() > max_trace && Q.b > 0 && Q.c > 0) continue;
            if (t > static_cast<std::size_t>(max_trace) + 2) continue;
            const std::size_t np = c == a[t - p] && t > 1 ? p : t;
            const bool mixed = Q.b > 0 && Q.c > 0;
            if (np == t && mixed && Q.trace() <= max_trace) ++out[Q.trace()];
            self(self, t + 1, np, Q);
        }
    };
    rec(rec, 1, 1, M{});
    return out;
}

std::map<long, long> counts_by_trace(const EnumerationReport& r) {
    std::map<long, long> out;
    for (const auto& c : r.classes) ++out[std::lround(c.trace)];
    return out;
}

}  // namespace

TEST_CASE("generators and relations", "[hecke]") {
    for (int N : {3, 4, 5, 7, 12}) {
        const HeckeGroup g(N);
        CHECK_THAT(g.lambda(), WithinAbs(2.0 * std::cos(kPi / N), 1e-15));
        const auto [S, T] = generators(g);
        const auto S2 = multiply(S, S);
        CHECK(S2.m.a == -1.0);
        CHECK(S2.m.d == -1.0);
        CHECK(S2.word.empty());
        CHECK(classify(S2) == ElementClass::Identity);
        CHECK(classify(S) == ElementClass::Elliptic);
        CHECK(classify(T) == ElementClass::Parabolic);
        // (ST)^N = +-I
        auto U = multiply(S, T), P = U;
        for (int k = 1; k < N; ++k) P.m = P.m * U.m;
        CHECK(std::abs(P.m.b) < 1e-12);
        CHECK(std::abs(P.m.c) < 1e-12);
        CHECK(std::abs(std::abs(P.m.a) - 1.0) < 1e-12);
        CHECK(classify(U) == ElementClass::Elliptic);
        CHECK(multiply(T, inverse(T)).word.empty());
    }
    CHECK_THROWS_AS(HeckeGroup(2), DomainError);
    CHECK(HeckeGroup::limit().lambda() == 2.0);
    CHECK(HeckeGroup::limit().s(7) == 7.0);
    CHECK(element_from_word(HeckeGroup(5), "STtS").word.empty());
    CHECK_THROWS_AS(element_from_word(HeckeGroup(5), "SX"), DomainError);
}

TEST_CASE("classification and lengths", "[hecke]") {
    const HeckeGroup g3(3);
    const auto h = element_from_word(g3, "TStS");
    CHECK(std::abs(h.m.trace()) == 3.0);
    CHECK(classify(h) == ElementClass::Hyperbolic);
    CHECK_THAT(geodesic_length(h), WithinRel(2.0 * std::acosh(1.5), 1e-15));
    CHECK_THROWS_AS(geodesic_length(element_from_word(g3, "T")), DomainError);
    CHECK_THROWS_AS(length_from_trace(2.0), DomainError);
    for (double l : {0.5, 1.0, 9.0}) CHECK_THAT(length_from_trace(trace_from_length(l)), WithinRel(l, 1e-12));

    // classification and length are conjugation invariant
    std::mt19937_64 rng(3);
    const HeckeGroup g5(5);
    const char letters[] = {'S', 'T', 't'};
    auto random_word = [&](int n) {
        std::string w;
        for (int i = 0; i < n; ++i) w += letters[rng() % 3];
        return w;
    };
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = element_from_word(g5, random_word(1 + int(rng() % 8)));
        const auto c = element_from_word(g5, random_word(1 + int(rng() % 5)));
        const auto y = multiply(multiply(c, x), inverse(c));
        if (classify(x) != classify(y)) ++mismatches;
        else if (classify(x) == ElementClass::Hyperbolic &&
                 std::abs(geodesic_length(x) - geodesic_length(y)) > 1e-9 * geodesic_length(x))
            ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("block matrices are S U^k", "[hecke]") {
    for (int N : {3, 5, 8}) {
        const HeckeGroup g(N);
        const auto [S, T] = generators(g);
        const auto U = multiply(S, T);
        auto Uk = GroupElement{{1.0, 0.0, 0.0, 1.0}, ""};
        for (int k = 1; k < N; ++k) {
            Uk = multiply(Uk, U);
            const auto M = multiply(S, Uk).m;
            const int j = 2 * k <= N ? k : k - N;
            const auto B = detail::block_matrix<double>(g, j);
            const double sign = std::abs(M.a - B.a) < 1e-9 && std::abs(M.b - B.b) < 1e-9 ? 1.0 : -1.0;
            CHECK_THAT(sign * M.a, WithinAbs(B.a, 1e-12));
            CHECK_THAT(sign * M.b, WithinAbs(B.b, 1e-12));
            CHECK_THAT(sign * M.c, WithinAbs(B.c, 1e-12));
            CHECK_THAT(sign * M.d, WithinAbs(B.d, 1e-12));
        }
    }
    CHECK_THROWS_AS(detail::block_matrix<std::int64_t>(HeckeGroup(5), 1), DomainError);
    for (int j : {1, -1, 2, -3}) {
        const auto a = detail::block_matrix<std::int64_t>(HeckeGroup::limit(), j);
        const auto b = detail::block_matrix<double>(HeckeGroup::limit(), j);
        CHECK(double(a.trace()) == b.trace());
        CHECK(a.det() == 1);
    }
}

TEST_CASE("canonical words evaluate to the class", "[hecke]") {
    for (auto g : {HeckeGroup(3), HeckeGroup(5), HeckeGroup(9), HeckeGroup::limit()}) {
        EnumerationOptions opt;
        opt.max_word_len = 30;
        opt.trace_bound = 2.0 * std::cosh(3.0);
        const auto r = enumerate_classes(g, opt);
        REQUIRE(!r.classes.empty());
        for (const auto& c : r.classes) {
            const std::string w = detail::canonical_word(c.blocks);
            CHECK(static_cast<int>(w.size()) == c.word_length);
            CHECK(c.word_length <= opt.max_word_len);
            const auto e = element_from_word(g, w);
            CHECK_THAT(std::abs(e.m.trace()), WithinRel(c.trace, 1e-10));
            CHECK(classify(e) == ElementClass::Hyperbolic);
            CHECK(c.blocks == detail::least_rotation(c.blocks));
        }
    }
}

TEST_CASE("PSL(2,Z) classes against the positive-monoid count", "[hecke]") {
    const long max_trace = 40;
    EnumerationOptions opt;
    opt.max_word_len = 400;
    opt.trace_bound = max_trace + 0.5;
    const auto r = enumerate_classes(HeckeGroup(3), opt);
    REQUIRE(r.trace_floor >= opt.trace_bound);
    const auto ours = counts_by_trace(r);
    const auto ref = psl2z_classes_by_trace(max_trace);
    CHECK(ours == ref);
    CHECK(ours.begin()->first == 3);
    CHECK(ours.at(3) == 1);
    CHECK(ours.at(4) == 2);
    CHECK(ours.at(6) == 3);
    // trace 7 = tr(A^2) for the trace-3 class, which is not primitive
    CHECK(ours.at(7) == 2);
}

TEST_CASE("short words: every hyperbolic trace of a word is a class trace", "[hecke]") {
    // all reduced words over {S, T, t} up to length 12
    const HeckeGroup g(3);
    std::set<long> word_traces;
    std::vector<std::string> layer{""};
    for (int n = 1; n <= 12; ++n) {
        std::vector<std::string> next;
        for (const auto& w : layer)
            for (char ch : {'S', 'T', 't'}) {
                if (!w.empty() && detail::cancels(w.back(), ch)) continue;
                next.push_back(w + ch);
            }
        for (const auto& w : next) {
            const auto e = element_from_word(g, w);
            if (classify(e) == ElementClass::Hyperbolic) word_traces.insert(std::lround(std::abs(e.m.trace())));
        }
        layer = std::move(next);
    }
    CHECK(*word_traces.begin() == 3);

    EnumerationOptions opt;
    opt.max_word_len = 400;
    opt.trace_bound = 60.5;
    const auto r = enumerate_classes(g, opt);
    std::set<long> class_traces;
    for (const auto& c : r.classes) {
        class_traces.insert(std::lround(c.trace));
        if (c.word_length <= 12) CHECK(word_traces.count(std::lround(c.trace)) == 1);
    }
    // powers of a class have trace T_k(tr); everything below 60 from a word is either a
    // primitive class trace or such a power
    for (long t : word_traces) {
        if (t > 60) continue;
        bool ok = class_traces.count(t) > 0;
        for (long p : class_traces) {
            long a = 2, b = p;  // Chebyshev: tr(A^k)
            for (int k = 2; k < 8 && !ok; ++k) {
                const long c = p * b - a;
                a = b;
                b = c;
                ok = b == t;
            }
        }
        CHECK(ok);
    }
}

TEST_CASE("spectrum invariants", "[hecke]") {
    for (auto g : {HeckeGroup(3), HeckeGroup(4), HeckeGroup(7), HeckeGroup::limit()}) {
        EnumerationOptions opt;
        opt.max_word_len = 60;
        opt.trace_bound = 2.0 * std::cosh(3.5);
        const auto r = enumerate_classes(g, opt);
        CHECK_NOTHROW(r.spectrum.validate());
        CHECK(r.spectrum.completeness_radius < length_from_trace(r.trace_floor) + 1e-12);
        // the inverse of each class is in the list
        std::set<std::vector<int>> all;
        for (const auto& c : r.classes) all.insert(c.blocks);
        for (const auto& c : r.classes) {
            CHECK(all.count(detail::inverse_blocks(g, c.blocks)) == 1);
            CHECK(c.trace > 2.0);
            CHECK(c.trace <= opt.trace_bound);
        }
        if (g.is_limit())
            for (const auto& c : r.classes) CHECK(c.trace == std::round(c.trace));
        for (const auto& w : r.warnings) CHECK(w.find("determinant drift") == std::string::npos);

        // identified keeps one of each inverse pair
        opt.convention = InverseConvention::identified;
        const auto ri = enumerate_classes(g, opt);
        std::size_t self = 0;
        for (const auto& c : r.classes) self += c.self_inverse;
        CHECK(2 * ri.classes.size() == r.classes.size() + self);
        CHECK(ri.spectrum.convention == InverseConvention::identified);
    }
}

TEST_CASE("enumeration is deterministic across thread counts", "[hecke]") {
    for (auto g : {HeckeGroup(5), HeckeGroup(3), HeckeGroup::limit()}) {
        EnumerationOptions opt;
        opt.max_word_len = 80;
        opt.trace_bound = 2.0 * std::cosh(4.0);
        const auto a = enumerate_classes(g, opt);
        opt.threads = 4;
        const auto b = enumerate_classes(g, opt);
        CHECK(a.spectrum == b.spectrum);
        CHECK(a.nodes_visited == b.nodes_visited);
        REQUIRE(a.classes.size() == b.classes.size());
        for (std::size_t i = 0; i < a.classes.size(); ++i) CHECK(a.classes[i].blocks == b.classes[i].blocks);
    }
}

TEST_CASE("nested enumerations", "[hecke]") {
    const HeckeGroup g(3);
    const double B = 2.0 * std::cosh(4.5);
    LengthSpectrum prev;
    for (int L : {10, 20, 40, 200}) {
        const auto s = enumerate_length_spectrum(g, L, B);
        CHECK(s.completeness_radius >= prev.completeness_radius);
        // every entry of the shorter enumeration appears with at most the new multiplicity
        for (const auto& e : prev.entries) {
            auto it = std::find_if(s.entries.begin(), s.entries.end(),
                                   [&](const LengthEntry& f) { return std::abs(f.length - e.length) <= 1e-12 * e.length; });
            REQUIRE(it != s.entries.end());
            CHECK(it->multiplicity >= e.multiplicity);
        }
        // below the radius, the shorter spectrum is already the full one
        if (!prev.entries.empty()) CHECK(s.truncated(prev.completeness_radius) == prev.truncated(prev.completeness_radius));
        prev = s;
    }
    CHECK_THAT(prev.entries.front().length, WithinRel(2.0 * std::acosh(1.5), 1e-15));
    CHECK(prev.completeness_radius < 9.0);
    CHECK(prev.completeness_radius > 8.99);
}

TEST_CASE("Hecke surface", "[hecke]") {
    const auto s = hecke_surface(6, {});
    CHECK(s.signature.cone_orders == std::vector<int>{2, 6});
    CHECK(s.degenerating_orders == std::vector<int>{6});
    CHECK(s.remaining_orders() == std::vector<int>{2});
    CHECK_THAT(s.volume(), WithinRel(kPi * 4.0 / 6.0, 1e-14));
}
