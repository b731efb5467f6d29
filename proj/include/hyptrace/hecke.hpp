#pragma once

// Hecke triangle groups G_N = <S, T> with S = [[0,-1],[1,0]], T = [[1, 2cos(pi/N)],[0,1]],
// and enumeration of their primitive hyperbolic conjugacy classes.
//
// With U = ST (order N in PSL(2,R)), G_N is the free product <S> * <U>. Every hyperbolic
// class is represented by a cyclic sequence of blocks S U^k, 1 <= k <= N-1, unique up to
// rotation. Writing s_k = sin(k pi/N) / sin(pi/N), the block S U^k equals (up to sign)
//   [[s_k, s_{k+1}], [s_{k-1}, s_k]]
// which is entrywise >= I. So traces of block products grow when blocks are appended,
// and a depth-first search over Lyndon words (the minimal rotation of an aperiodic
// cyclic sequence) can be pruned on the trace of its prefix. Block k is labelled by the
// signed index j = k for k <= N/2 and j = k - N otherwise; the limit group N -> infinity
// (S and translation by 2) uses the same labels with s_k = k.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "geometry.hpp"
#include "numerics.hpp"
#include "surface.hpp"

namespace hyptrace {

class HeckeGroup {
public:
    explicit HeckeGroup(int N) : N_(N) {
        if (N < 3) throw DomainError("HeckeGroup: N must be >= 3");
        lambda_ = N == 3 ? 1.0 : 2.0 * std::cos(kPi / N);
    }
    /// The limit of G_N as N -> infinity: T becomes translation by 2.
    static HeckeGroup limit() { return HeckeGroup(); }

    [[nodiscard]] bool is_limit() const noexcept { return N_ == 0; }
    /// 0 for the limit group.
    [[nodiscard]] int N() const noexcept { return N_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }

    /// s_k = sin(k pi/N) / sin(pi/N); k for the limit group.
    [[nodiscard]] double s(int k) const {
        if (is_limit()) return k;
        if (k == 0 || k == N_) return 0.0;
        return std::sin(kPi * k / N_) / std::sin(kPi / N_);
    }

private:
    HeckeGroup() : N_(0), lambda_(2.0) {}
    int N_;
    double lambda_;
};

template <class Scalar>
struct Mat2 {
    Scalar a{1}, b{0}, c{0}, d{1};

    [[nodiscard]] Scalar trace() const { return a + d; }
    [[nodiscard]] Scalar det() const { return a * d - b * c; }
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// A group element: its matrix and a freely reduced word over S, T ('T') and T^-1 ('t').
struct GroupElement {
    Mat2<double> m;
    std::string word;
};

enum class ElementClass { Identity, Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(ElementClass c) {
    switch (c) {
        case ElementClass::Identity: return "identity";
        case ElementClass::Elliptic: return "elliptic";
        case ElementClass::Parabolic: return "parabolic";
        case ElementClass::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

namespace detail {

inline bool cancels(char x, char y) {
    return (x == 'S' && y == 'S') || (x == 'T' && y == 't') || (x == 't' && y == 'T');
}

/// Free reduction with S^2 = 1.
inline std::string reduce_word(const std::string& w) {
    std::string out;
    for (char ch : w) {
        if (ch != 'S' && ch != 'T' && ch != 't') throw DomainError(std::string("reduce_word: bad letter '") + ch + "'");
        if (!out.empty() && cancels(out.back(), ch)) out.pop_back();
        else out.push_back(ch);
    }
    return out;
}

}  // namespace detail

/// S and T exactly as displayed (T has off-diagonal entry lambda = 2 cos(pi/N)).
inline std::pair<GroupElement, GroupElement> generators(const HeckeGroup& g) {
    GroupElement S{{0.0, -1.0, 1.0, 0.0}, "S"};
    GroupElement T{{1.0, g.lambda(), 0.0, 1.0}, "T"};
    return {S, T};
}

inline GroupElement multiply(const GroupElement& x, const GroupElement& y) {
    return {x.m * y.m, detail::reduce_word(x.word + y.word)};
}

inline GroupElement inverse(const GroupElement& x) {
    std::string w(x.word.rbegin(), x.word.rend());
    for (char& ch : w) ch = ch == 'T' ? 't' : (ch == 't' ? 'T' : 'S');
    return {{x.m.d, -x.m.b, -x.m.c, x.m.a}, w};
}

/// Evaluates a word over {S, T, t}.
inline GroupElement element_from_word(const HeckeGroup& g, const std::string& word) {
    const auto [S, T] = generators(g);
    const GroupElement Ti = inverse(T);
    GroupElement e{{1.0, 0.0, 0.0, 1.0}, ""};
    for (char ch : word) e = multiply(e, ch == 'S' ? S : (ch == 'T' ? T : (ch == 't' ? Ti : throw DomainError("element_from_word: bad letter"))));
    return e;
}

/// By |trace| against 2, with |(|tr| - 2)| <= 1e-9 read as parabolic; +-I is the identity.
inline ElementClass classify(const GroupElement& g) {
    constexpr double tol = 1e-9;
    const auto& m = g.m;
    if (std::abs(m.b) <= tol && std::abs(m.c) <= tol && std::abs(std::abs(m.a) - 1.0) <= tol &&
        std::abs(m.a - m.d) <= tol)
        return ElementClass::Identity;
    const double tr = std::abs(m.trace());
    if (std::abs(tr - 2.0) <= tol) return ElementClass::Parabolic;
    return tr > 2.0 ? ElementClass::Hyperbolic : ElementClass::Elliptic;
}

/// Length from |tr| = 2 cosh(l/2).
inline double length_from_trace(double abs_trace) {
    if (!(abs_trace > 2.0)) throw DomainError("length_from_trace: requires |tr| > 2");
    return 2.0 * acosh1p(0.5 * abs_trace - 1.0);
}

inline double geodesic_length(const GroupElement& g) {
    if (classify(g) != ElementClass::Hyperbolic) throw DomainError("geodesic_length: element is not hyperbolic");
    return length_from_trace(std::abs(g.m.trace()));
}

/// Trace of a hyperbolic class of length l.
inline double trace_from_length(double l) { return 2.0 * std::cosh(0.5 * l); }

// ---------------------------------------------------------------------------------------
// Block enumeration

/// One primitive hyperbolic class.
struct HyperbolicClass {
    std::vector<int> blocks;  // Lyndon representative, signed indices
    double trace = 0.0;
    double length = 0.0;
    int word_length = 0;  // cyclic length of the canonical word over {S, T, T^-1}
    bool self_inverse = false;
};

struct EnumerationOptions {
    int max_word_len = 200;
    double trace_bound = 2.0 * std::cosh(4.5);
    InverseConvention convention = InverseConvention::distinct;
    /// Worker threads for the prefix shards; 0 = hardware concurrency.
    int threads = 1;
};

struct EnumerationReport {
    std::vector<HyperbolicClass> classes;  // sorted by (trace, blocks)
    LengthSpectrum spectrum;
    std::vector<std::string> warnings;
    /// Smallest trace a missing class can have (min of the trace bound and the overflow bound).
    double trace_floor = 0.0;
    std::size_t nodes_visited = 0;
};

namespace detail {

/// Signed block labels for G_N in ascending order; the limit group is cut at |j| <= jmax.
inline std::vector<int> block_alphabet(const HeckeGroup& g, int jmax) {
    std::vector<int> out;
    if (g.is_limit()) {
        for (int j = -jmax; j <= jmax; ++j)
            if (j != 0) out.push_back(j);
        return out;
    }
    const int N = g.N();
    for (int k = 1; k < N; ++k) out.push_back(2 * k <= N ? k : k - N);
    std::sort(out.begin(), out.end());
    return out;
}

inline int normalize_label(const HeckeGroup& g, int j) {
    if (!g.is_limit() && 2 * j == -g.N()) return -j;
    return j;
}

/// Nonnegative representative of S U^k for the block label j.
template <class Scalar>
Mat2<Scalar> block_matrix(const HeckeGroup& g, int j) {
    if constexpr (std::is_integral_v<Scalar>) {
        // exact only where s_k is an integer sequence
        if (!(g.is_limit() || g.N() == 3)) throw DomainError("block_matrix: exact arithmetic needs N = 3 or the limit group");
        auto s = [&](int k) -> Scalar {
            if (g.is_limit()) return k;
            static constexpr std::array<Scalar, 4> s3{0, 1, 1, 0};
            return s3[static_cast<std::size_t>(k)];
        };
        if (j > 0) return {s(j), s(j + 1), s(j - 1), s(j)};
        return {s(-j), s(-j - 1), s(-j + 1), s(-j)};
    } else {
        if (j > 0) return {g.s(j), g.s(j + 1), g.s(j - 1), g.s(j)};
        return {g.s(-j), g.s(-j - 1), g.s(-j + 1), g.s(-j)};
    }
}

/// Letters of the canonical word of block j: T (ST)^{j-1} for j > 0, S (t S)^{|j|} for j < 0.
inline int block_word_cost(int j) { return j > 0 ? 2 * j - 1 : 2 * (-j) + 1; }

/// Cyclic length of the reduced canonical word: adjacent negative blocks share a cancelling S S.
inline int cyclic_word_length(const std::vector<int>& blocks) {
    int len = 0;
    const std::size_t m = blocks.size();
    for (std::size_t i = 0; i < m; ++i) {
        len += block_word_cost(blocks[i]);
        if (blocks[i] < 0 && blocks[(i + 1) % m] < 0) len -= 2;
    }
    return len;
}

inline std::string canonical_word(const std::vector<int>& blocks) {
    std::string w;
    for (int j : blocks) {
        if (j > 0) {
            w += 'T';
            for (int i = 1; i < j; ++i) w += "ST";
        } else {
            w += 'S';
            for (int i = 0; i < -j; ++i) w += "tS";
        }
    }
    // cyclic reduction
    std::string r = reduce_word(w);
    while (r.size() >= 2 && cancels(r.front(), r.back())) r = r.substr(1, r.size() - 2);
    return r;
}

/// Minimal rotation (Booth-free quadratic version; sequences are short).
inline std::vector<int> least_rotation(const std::vector<int>& v) {
    std::vector<int> best = v;
    std::vector<int> cur = v;
    for (std::size_t i = 1; i < v.size(); ++i) {
        std::rotate(cur.begin(), cur.begin() + 1, cur.end());
        if (cur < best) best = cur;
    }
    return best;
}

inline std::vector<int> inverse_blocks(const HeckeGroup& g, const std::vector<int>& blocks) {
    std::vector<int> inv(blocks.rbegin(), blocks.rend());
    for (int& j : inv) j = normalize_label(g, -j);
    return least_rotation(inv);
}

template <class Scalar>
struct SearchState {
    const HeckeGroup& group;
    const std::vector<int>& alphabet;
    std::vector<Mat2<Scalar>> table;
    int max_len;
    double trace_bound;
    InverseConvention convention;

    std::vector<int> a;  // a[1..t]; a[0] unused
    std::vector<HyperbolicClass> found;
    std::vector<std::string> warnings;
    double overflow_floor = std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;

    [[nodiscard]] const Mat2<Scalar>& block(int j) const {
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), j);
        return table[static_cast<std::size_t>(it - alphabet.begin())];
    }

    [[nodiscard]] bool constant_unit(std::size_t t) const {
        const int first = a[1];
        if (first != 1 && first != -1) return false;
        for (std::size_t i = 2; i <= t; ++i)
            if (a[i] != first) return false;
        return true;
    }

    void note_overflow(const Mat2<Scalar>& P, std::size_t t) {
        // Every class whose Lyndon word starts with a[1..t] has trace >= tr(P), unless the
        // prefix is a power of a parabolic block; then it needs one more distinct block.
        if (!constant_unit(t)) {
            overflow_floor = std::min(overflow_floor, static_cast<double>(P.trace()));
            return;
        }
        for (int c : alphabet) {
            if (c == a[1] || std::abs(c) > 2) continue;
            overflow_floor = std::min(overflow_floor, static_cast<double>((P * block(c)).trace()));
        }
    }

    void emit(const Mat2<Scalar>& P, std::size_t t) {
        std::vector<int> blocks(a.begin() + 1, a.begin() + static_cast<std::ptrdiff_t>(t) + 1);
        const double tr = static_cast<double>(P.trace());
        const int len = cyclic_word_length(blocks);
        if (len > max_len) {
            overflow_floor = std::min(overflow_floor, tr);
            return;
        }
        const double det = static_cast<double>(P.det());
        if (!(std::abs(det - 1.0) < 1e-9))
            warnings.push_back("determinant drift " + std::to_string(det - 1.0) + " at word " + canonical_word(blocks));
        if (!(tr > 2.0 + 1e-9)) {
            warnings.push_back("non-hyperbolic primitive block word " + canonical_word(blocks));
            return;
        }
        const auto inv = inverse_blocks(group, blocks);
        const bool self_inv = inv == blocks;
        if (convention == InverseConvention::identified && inv < blocks) return;
        found.push_back({std::move(blocks), tr, length_from_trace(tr), len, self_inv});
    }

    /// FKM pre-necklace recursion: a[1..t-1] is a prefix with period p.
    void dfs(std::size_t t, std::size_t p, const Mat2<Scalar>& P, int cost) {
        ++nodes;
        if (a.size() <= t) a.resize(t + 1);
        for (int c : alphabet) {
            if (t > 1 && c < a[t - p]) continue;
            a[t] = c;
            const Mat2<Scalar> Q = P * block(c);
            if (static_cast<double>(Q.trace()) > trace_bound) continue;
            const int q_cost = cost + (c > 0 ? 2 * c - 1 : -2 * c - 1);
            if (q_cost > max_len) {
                note_overflow(Q, t);
                continue;
            }
            const std::size_t np = (t > 1 && c == a[t - p]) ? p : t;
            if (np == t && !constant_unit(t)) emit(Q, t);
            dfs(t + 1, np, Q, q_cost);
        }
    }
};

template <class Scalar>
SearchState<Scalar> run_shard(const HeckeGroup& g, const std::vector<int>& alphabet, const EnumerationOptions& opt,
                              int first) {
    SearchState<Scalar> st{g, alphabet, {}, opt.max_word_len, opt.trace_bound, opt.convention, {}, {}, {}};
    for (int j : alphabet) st.table.push_back(block_matrix<Scalar>(g, j));
    st.a.assign(2, 0);
    // The shard fixes a[1] = first; replay the loop body of dfs(1, 1, I, 0) for that letter.
    const Mat2<Scalar> Q = st.block(first);
    ++st.nodes;
    if (static_cast<double>(Q.trace()) > opt.trace_bound) return st;
    st.a[1] = first;
    const int cost = first > 0 ? 2 * first - 1 : -2 * first - 1;
    if (cost > opt.max_word_len) {
        st.note_overflow(Q, 1);
        return st;
    }
    if (!st.constant_unit(1)) st.emit(Q, 1);
    st.dfs(2, 1, Q, cost);
    return st;
}

template <class Scalar>
EnumerationReport enumerate_blocks(const HeckeGroup& g, const EnumerationOptions& opt) {
    if (opt.max_word_len < 1) throw DomainError("enumerate_length_spectrum: max_word_len must be >= 1");
    if (!(opt.trace_bound > 2.0)) throw DomainError("enumerate_length_spectrum: trace_bound must be > 2");
    const auto alphabet = block_alphabet(g, (opt.max_word_len + 1) / 2 + 1);

    std::vector<SearchState<Scalar>> shards;
    shards.reserve(alphabet.size());
    int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, static_cast<int>(alphabet.size()));
    if (threads <= 1) {
        for (int c : alphabet) shards.push_back(run_shard<Scalar>(g, alphabet, opt, c));
    } else {
        std::vector<std::optional<SearchState<Scalar>>> slots(alphabet.size());
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < alphabet.size(); i = next++)
                    slots[i].emplace(run_shard<Scalar>(g, alphabet, opt, alphabet[i]));
            });
        for (auto& th : pool) th.join();
        for (auto& s : slots) shards.push_back(std::move(*s));
    }

    // Merge in alphabet order so the result does not depend on the thread count.
    EnumerationReport rep;
    double floor = opt.trace_bound;
    for (auto& s : shards) {
        for (auto& c : s.found) rep.classes.push_back(std::move(c));
        for (auto& w : s.warnings) rep.warnings.push_back(std::move(w));
        floor = std::min(floor, s.overflow_floor);
        rep.nodes_visited += s.nodes;
    }
    // The limit-group alphabet is cut at jmax; a longer single block costs more than max_word_len.
    rep.trace_floor = floor;
    std::sort(rep.classes.begin(), rep.classes.end(), [](const HyperbolicClass& x, const HyperbolicClass& y) {
        return x.trace != y.trace ? x.trace < y.trace : x.blocks < y.blocks;
    });
    return rep;
}

/// Groups classes of equal trace (to 1e-9 relative) into length entries.
inline void assemble_spectrum(EnumerationReport& rep, InverseConvention conv) {
    LengthSpectrum spec;
    spec.convention = conv;
    std::size_t i = 0;
    const auto& cl = rep.classes;
    while (i < cl.size()) {
        std::size_t j = i + 1;
        while (j < cl.size() && cl[j].trace - cl[i].trace <= 1e-9 * cl[i].trace) ++j;
        const double spread = cl[j - 1].trace - cl[i].trace;
        if (spread > 1e-11 * cl[i].trace)
            rep.warnings.push_back("trace near-collision: " + std::to_string(j - i) + " classes within " +
                                   std::to_string(spread) + " of trace " + std::to_string(cl[i].trace));
        // Median member's length keeps the entry independent of summation order.
        spec.entries.push_back({cl[i + (j - i) / 2].length, static_cast<long long>(j - i)});
        i = j;
    }
    // Non-primitivity check by trace: l = k l' for a shorter class. Block words are
    // primitive by construction, so a hit is reported, not acted on.
    for (const auto& e : spec.entries) {
        for (const auto& f : spec.entries) {
            if (!(2.0 * f.length <= e.length * (1.0 + 1e-9))) break;
            const double k = std::round(e.length / f.length);
            const double te = trace_from_length(e.length);
            if (k >= 2.0 && std::abs(te - trace_from_length(k * f.length)) <= 1e-9 * te)
                rep.warnings.push_back("length " + std::to_string(e.length) + " is " + std::to_string(int(k)) +
                                       " x length " + std::to_string(f.length) + " (kept: block word is primitive)");
        }
    }
    // Every class with trace < trace_floor was visited.
    double floor = rep.trace_floor;
    spec.completeness_radius = floor > 2.0 ? std::nextafter(length_from_trace(floor), 0.0) : 0.0;
    rep.spectrum = std::move(spec);
}

}  // namespace detail

/// Primitive hyperbolic classes of G_N with |tr| <= trace_bound and canonical word length
/// <= max_word_len, with the float path cross-checked against exact integer arithmetic
/// for N = 3 and the limit group.
inline EnumerationReport enumerate_classes(const HeckeGroup& g, const EnumerationOptions& opt) {
    auto rep = detail::enumerate_blocks<double>(g, opt);
    if (g.is_limit() || g.N() == 3) {
        auto exact = detail::enumerate_blocks<std::int64_t>(g, opt);
        // Float ties can order equal-trace classes differently; match by block word.
        auto by_blocks = [](const HyperbolicClass& x, const HyperbolicClass& y) { return x.blocks < y.blocks; };
        auto fl = rep.classes;
        std::sort(fl.begin(), fl.end(), by_blocks);
        std::sort(exact.classes.begin(), exact.classes.end(), by_blocks);
        bool same = exact.classes.size() == fl.size();
        for (std::size_t i = 0; same && i < fl.size(); ++i) {
            same = exact.classes[i].blocks == fl[i].blocks;
            if (same && std::abs(exact.classes[i].trace - fl[i].trace) > 1e-9 * exact.classes[i].trace)
                rep.warnings.push_back("float trace drift on word " + detail::canonical_word(fl[i].blocks));
        }
        if (!same) {
            rep.warnings.push_back("exact and floating-point enumerations disagree; using the exact one");
        }
        // Exact traces are integers; they replace the float ones.
        rep.classes = std::move(exact.classes);
        rep.trace_floor = exact.trace_floor;
        std::sort(rep.classes.begin(), rep.classes.end(), [](const HyperbolicClass& x, const HyperbolicClass& y) {
            return x.trace != y.trace ? x.trace < y.trace : x.blocks < y.blocks;
        });
    }
    detail::assemble_spectrum(rep, opt.convention);
    return rep;
}

inline LengthSpectrum enumerate_length_spectrum(const HeckeGroup& g, int max_word_len, double trace_bound,
                                                InverseConvention conv = InverseConvention::distinct) {
    EnumerationOptions opt;
    opt.max_word_len = max_word_len;
    opt.trace_bound = trace_bound;
    opt.convention = conv;
    return enumerate_classes(g, opt).spectrum;
}

inline LengthSpectrum limit_group_spectrum(int max_word_len, double trace_bound,
                                           InverseConvention conv = InverseConvention::distinct) {
    return enumerate_length_spectrum(HeckeGroup::limit(), max_word_len, trace_bound, conv);
}

/// The Hecke orbifold: genus 0, one cusp, cones of order 2 and N, the order-N cone degenerating.
inline SurfaceData hecke_surface(int N, LengthSpectrum spectrum) {
    SurfaceData s;
    s.signature = {0, 1, {2, N}};
    s.spectrum = std::move(spectrum);
    s.degenerating_orders = {N};
    s.validate();
    return s;
}

}  // namespace hyptrace
