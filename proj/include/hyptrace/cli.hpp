#pragma once

// Batch commands behind tools/hyptrace: each evaluates a grid, writes CSV rows in grid
// order (workers may finish in any order) plus a JSON sidecar with the configuration,
// column meanings and failure counts, and returns a process exit code:
//   0 success, 2 tolerance violation, 3 quadrature failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cone_trace.hpp"
#include "hecke.hpp"
#include "io.hpp"
#include "surface.hpp"

namespace hyptrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTolerance = 2;
inline constexpr int kExitQuadrature = 3;
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct SweepSpec {
    std::string command;
    std::vector<int> q_list;
    std::vector<int> n_list;
    std::vector<double> delta_list;
    std::vector<double> t_list;
    std::vector<double> s_list{0.0};
    std::string fixture;
    std::string eigenvalues;
    std::string out = "-";
    std::string cache_dir;
    QuadratureConfig quad{};
    int threads = 1;
    InverseConvention convention = InverseConvention::distinct;
    int max_word_len = 200;
    double trace_bound = 2.0 * std::cosh(4.5);
    double tolerance = 1e-8;

    void validate() const {
        quad.validate();
        for (double t : t_list)
            if (!(t > 0.0)) throw DomainError("grid-t values must be > 0");
        if (threads < 0) throw DomainError("--threads must be >= 0");
    }
};

/// One CSV row: cells plus its outcome.
struct Row {
    std::vector<std::string> cells;
    bool violation = false;
    bool failure = false;
};

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Evaluates job(i) for i < n on `threads` workers; results land in slot i.
inline std::vector<Row> run_pool(std::size_t n, int threads, const std::function<Row(std::size_t)>& job) {
    std::vector<Row> rows(n);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(n, threads == 0 ? hw : static_cast<unsigned>(threads));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) rows[i] = job(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) rows[i] = job(i);
        });
    for (auto& th : pool) th.join();
    return rows;
}

struct Column {
    std::string name;
    std::string meaning;
};

struct Report {
    std::vector<Column> columns;
    std::vector<Row> rows;
    std::vector<std::string> warnings;
    json extra = json::object();
};

inline json spec_to_json(const SweepSpec& s) {
    return json{{"command", s.command},
                {"grid_q", s.q_list},
                {"grid_n", s.n_list},
                {"grid_delta", s.delta_list},
                {"grid_t", s.t_list},
                {"grid_s", s.s_list},
                {"fixture", s.fixture},
                {"eigenvalues", s.eigenvalues},
                {"rel_tol", s.quad.rel_tol},
                {"abs_tol", s.quad.abs_tol},
                {"max_subdivisions", s.quad.max_subdivisions},
                {"tail_cutoff_tol", s.quad.tail_cutoff_tol},
                {"check_tolerance", s.tolerance},
                {"threads", s.threads},
                {"convention_inverse_classes", to_string(s.convention)},
                {"max_word_len", s.max_word_len},
                {"trace_bound", s.trace_bound}};
}

/// Writes the CSV (to stdout for "-") and, for a file, the sidecar next to it.
inline int emit(const SweepSpec& spec, const Report& rep) {
    std::ostringstream csv;
    csv << "# hyptrace " << spec.command << " csv_schema=" << kCsvSchemaVersion << '\n';
    for (std::size_t i = 0; i < rep.columns.size(); ++i) csv << (i ? "," : "") << rep.columns[i].name;
    csv << '\n';
    int violations = 0, failures = 0;
    for (const auto& r : rep.rows) {
        for (std::size_t i = 0; i < r.cells.size(); ++i) csv << (i ? "," : "") << csv_escape(r.cells[i]);
        csv << '\n';
        violations += r.violation;
        failures += r.failure;
    }
    const int code = failures ? kExitQuadrature : (violations ? kExitTolerance : kExitOk);

    if (spec.out == "-") {
        std::cout << csv.str();
    } else {
        const std::filesystem::path out(spec.out);
        if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
        std::ofstream(out) << csv.str();
        json cols = json::array();
        for (const auto& c : rep.columns) cols.push_back({{"name", c.name}, {"meaning", c.meaning}});
        json side{{"tool", "hyptrace"},
                  {"tool_version", kToolVersion},
                  {"csv_schema", kCsvSchemaVersion},
                  {"config", spec_to_json(spec)},
                  {"columns", cols},
                  {"rows", rep.rows.size()},
                  {"violations", violations},
                  {"quadrature_failures", failures},
                  {"exit_code", code},
                  {"warnings", rep.warnings},
                  {"extra", rep.extra}};
        std::ofstream(out.string() + ".json") << side.dump(2) << '\n';
    }
    if (violations) std::cerr << spec.command << ": " << violations << " tolerance violation(s)\n";
    if (failures) std::cerr << spec.command << ": " << failures << " quadrature failure(s)\n";
    return code;
}

inline Row failure_row(std::vector<std::string> lead, std::size_t total_cols, const std::string& what) {
    Row r;
    r.cells = std::move(lead);
    while (r.cells.size() + 1 < total_cols) r.cells.emplace_back();
    r.cells.push_back("quadrature_failure: " + what);
    r.failure = true;
    return r;
}

/// Both elliptic-trace representations over (q, t).
inline int cmd_parseval_check(const SweepSpec& spec) {
    spec.validate();
    Report rep;
    rep.columns = {{"q", "cone order"},
                   {"t", "time"},
                   {"elliptic", "cosh/sinh^2 representation"},
                   {"elliptic_err", "its error estimate"},
                   {"hejhal", "exponential-weight representation"},
                   {"hejhal_err", "its error estimate"},
                   {"rel_diff", "|elliptic - hejhal| / |hejhal| (0 when both vanish)"},
                   {"status", "ok | violation | quadrature_failure"}};
    struct P { int q; double t; };
    std::vector<P> grid;
    for (int q : spec.q_list)
        for (double t : spec.t_list) grid.push_back({q, t});
    ConeTraceConfig cfg;
    cfg.quad = spec.quad;
    rep.rows = run_pool(grid.size(), spec.threads, [&](std::size_t i) {
        const auto [q, t] = grid[i];
        try {
            if (q < 1) throw DomainError("cone order must be >= 1");
            const ConeParams cone(q);
            const auto a = elliptic_cone_trace(cone, t, cfg);
            const auto b = elliptic_cone_trace_hejhal(cone, t, cfg);
            const double denom = std::abs(b.value);
            const double rel = denom == 0.0 ? std::abs(a.value) : std::abs(a.value - b.value) / denom;
            Row r;
            r.violation = !(rel <= spec.tolerance);
            r.cells = {std::to_string(q), fmt(t),        fmt(a.value.real()), fmt(a.error_estimate),
                       fmt(b.value),      fmt(b.error_estimate), fmt(rel), r.violation ? "violation" : "ok"};
            return r;
        } catch (const QuadratureFailure& f) {
            return failure_row({std::to_string(q), fmt(t)}, rep.columns.size(), f.what());
        }
    });
    return emit(spec, rep);
}

/// |I_{q,delta}(z)| against the explicit bound over (q, delta, t, s).
inline int cmd_bound_check(const SweepSpec& spec) {
    spec.validate();
    Report rep;
    rep.columns = {{"q", "cone order"},
                   {"delta", "truncation level"},
                   {"t", "Re z"},
                   {"s", "Im z"},
                   {"trace_re", "Re I_{q,delta}(z)"},
                   {"trace_im", "Im I_{q,delta}(z)"},
                   {"trace_abs", "|I_{q,delta}(z)|"},
                   {"trace_err", "quadrature error estimate"},
                   {"bound", "exp(-t/4)/sqrt(pi|z|) (delta/2pi)^(-2 eta gamma) [zeta(1+2 eta gamma)+pi]"},
                   {"ratio", "trace_abs / bound"},
                   {"status", "ok | violation | quadrature_failure"}};
    struct P { int q; double delta, t, s; };
    std::vector<P> grid;
    for (int q : spec.q_list)
        for (double d : spec.delta_list)
            for (double t : spec.t_list)
                for (double s : spec.s_list) grid.push_back({q, d, t, s});
    ConeTraceConfig cfg;
    cfg.quad = spec.quad;
    rep.rows = run_pool(grid.size(), spec.threads, [&](std::size_t i) {
        const auto [q, d, t, s] = grid[i];
        try {
            const ComplexTime z(t, s);
            const auto I = truncated_cone_trace(ConeParams(q), d, z, cfg);
            const double bound = degeneration_bound(DegenerationBoundParams(d, z), z);
            const double ratio = std::abs(I.value) / bound;
            Row r;
            r.violation = !(ratio <= 1.0);
            r.cells = {std::to_string(q), fmt(d), fmt(t), fmt(s), fmt(I.value.real()), fmt(I.value.imag()),
                       fmt(std::abs(I.value)), fmt(I.error_estimate), fmt(bound), fmt(ratio),
                       r.violation ? "violation" : "ok"};
            return r;
        } catch (const QuadratureFailure& f) {
            return failure_row({std::to_string(q), fmt(d), fmt(t), fmt(s)}, rep.columns.size(), f.what());
        }
    });
    return emit(spec, rep);
}

inline EnumerationOptions enumeration_options(const SweepSpec& spec) {
    EnumerationOptions o;
    o.max_word_len = spec.max_word_len;
    o.trace_bound = spec.trace_bound;
    o.convention = spec.convention;
    o.threads = spec.threads;
    return o;
}

/// Reduced trace HTr + ETr - DTr of the Hecke surfaces G_N over (N, t, s).
inline int cmd_degeneration_sweep(const SweepSpec& spec) {
    spec.validate();
    Report rep;
    rep.columns = {{"N", "Hecke index (cones 2 and N, the N-cone degenerating)"},
                   {"t", "Re z"},
                   {"s", "Im z"},
                   {"reduced_re", "Re (HTr + ETr - DTr)"},
                   {"reduced_im", "Im (HTr + ETr - DTr)"},
                   {"error_estimate", "quadrature and series error"},
                   {"completeness_deficit", "bound on classes beyond the completeness radius"},
                   {"hyperbolic_re", "Re HTr"},
                   {"elliptic_re", "Re ETr (both cones)"},
                   {"degenerating_re", "Re DTr"},
                   {"t32_abs", "t^(3/2) |reduced|"},
                   {"lengths", "distinct lengths in the truncated spectrum"},
                   {"completeness_radius", "all classes up to this length are present"},
                   {"status", "ok | quadrature_failure"}};
    std::vector<SurfaceData> surfaces;
    for (int N : spec.n_list) {
        std::vector<std::string> warns;
        auto sp = cached_length_spectrum(HeckeGroup(N), enumeration_options(spec), spec.cache_dir, &warns);
        for (auto& w : warns) rep.warnings.push_back("N=" + std::to_string(N) + ": " + w);
        surfaces.push_back(hecke_surface(N, std::move(sp)));
    }
    struct P { std::size_t k; double t, s; };
    std::vector<P> grid;
    for (std::size_t k = 0; k < spec.n_list.size(); ++k)
        for (double t : spec.t_list)
            for (double s : spec.s_list) grid.push_back({k, t, s});
    SurfaceTraceConfig cfg;
    cfg.hyperbolic.quad = spec.quad;
    cfg.cone.quad = spec.quad;
    rep.rows = run_pool(grid.size(), spec.threads, [&](std::size_t i) {
        const auto [k, t, s] = grid[i];
        const auto& surf = surfaces[k];
        const std::string N = std::to_string(spec.n_list[k]);
        try {
            const ComplexTime z(t, s);
            const auto red = reduced_trace(surf, z, cfg);
            const auto h = hyperbolic_trace(surf.spectrum, z, cfg.hyperbolic);
            const auto e = elliptic_trace(surf.signature.cone_orders, z, cfg.cone);
            const auto d = degenerating_trace(surf, z, cfg.cone);
            Row r;
            r.cells = {N, fmt(t), fmt(s), fmt(red.value.real()), fmt(red.value.imag()), fmt(red.error_estimate),
                       fmt(red.completeness_deficit), fmt(h.value.real()), fmt(e.value.real()), fmt(d.value.real()),
                       fmt(std::pow(t, 1.5) * std::abs(red.value)), std::to_string(surf.spectrum.entries.size()),
                       fmt(surf.spectrum.completeness_radius), "ok"};
            return r;
        } catch (const QuadratureFailure& f) {
            return failure_row({N, fmt(t), fmt(s)}, rep.columns.size(), f.what());
        }
    });
    return emit(spec, rep);
}

inline std::vector<double> read_eigenvalues(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open eigenvalue file " + path);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') {
            std::getline(in, tok);
            continue;
        }
        out.push_back(std::stod(tok));
    }
    return out;
}

/// Geometric side of the trace formula with the heat pair exp(-z(r^2 + 1/4)), against the
/// standard trace; the spectral side too when eigenvalues are given.
inline int cmd_stf_eval(const SweepSpec& spec) {
    spec.validate();
    if (spec.fixture.empty()) throw DomainError("stf-eval needs --fixture");
    const SurfaceData surf = load_surface(spec.fixture);
    std::vector<double> eig;
    const bool have_eig = !spec.eigenvalues.empty();
    if (have_eig) eig = read_eigenvalues(spec.eigenvalues);
    Report rep;
    rep.columns = {{"t", "Re z"},
                   {"s", "Im z"},
                   {"geometric_re", "Re geometric side (identity + hyperbolic + elliptic terms)"},
                   {"geometric_im", "Im geometric side"},
                   {"geometric_err", "its error estimate"},
                   {"standard_re", "Re standard trace HTr + ETr + vol K_H(z,0)"},
                   {"standard_im", "Im standard trace"},
                   {"standard_err", "its error estimate"},
                   {"rel_diff", "|geometric - standard| / |standard|"},
                   {"completeness_deficit", "bound on classes beyond the completeness radius"},
                   {"spectral_re", "Re sum H(r_n) (empty without eigenvalues)"},
                   {"spectral_im", "Im sum H(r_n)"},
                   {"spectral_minus_geometric", "|spectral - geometric| (empty without eigenvalues)"},
                   {"status", "ok | violation | quadrature_failure"}};
    rep.extra = {{"volume", surf.volume()}, {"eigenvalue_count", eig.size()}};
    struct P { double t, s; };
    std::vector<P> grid;
    for (double t : spec.t_list)
        for (double s : spec.s_list) grid.push_back({t, s});
    SurfaceTraceConfig cfg;
    cfg.hyperbolic.quad = spec.quad;
    cfg.cone.quad = spec.quad;
    rep.rows = run_pool(grid.size(), spec.threads, [&](std::size_t i) {
        const auto [t, s] = grid[i];
        try {
            const ComplexTime z(t, s);
            const auto pair = TestFunctionPair::heat(z);
            const auto geo = stf_geometric_side(surf, pair, cfg);
            const auto st = standard_trace(surf, z, cfg);
            const double rel = std::abs(geo.value - st.value) / std::abs(st.value);
            Row r;
            r.violation = !(rel <= spec.tolerance);
            r.cells = {fmt(t), fmt(s), fmt(geo.value.real()), fmt(geo.value.imag()), fmt(geo.error_estimate),
                       fmt(st.value.real()), fmt(st.value.imag()), fmt(st.error_estimate), fmt(rel),
                       fmt(st.completeness_deficit)};
            if (have_eig) {
                const cplx sp = stf_spectral_side_compact(eig, pair);
                r.cells.insert(r.cells.end(), {fmt(sp.real()), fmt(sp.imag()), fmt(std::abs(sp - geo.value))});
            } else {
                r.cells.insert(r.cells.end(), {"", "", ""});
            }
            r.cells.push_back(r.violation ? "violation" : "ok");
            return r;
        } catch (const QuadratureFailure& f) {
            return failure_row({fmt(t), fmt(s)}, rep.columns.size(), f.what());
        }
    });
    return emit(spec, rep);
}

/// Writes the Hecke surface for each N (spectrum enumerated or taken from the cache) as a
/// surface fixture; with several N the output path gets a _N{N} suffix.
inline int cmd_hecke_spectrum(const SweepSpec& spec) {
    spec.validate();
    if (spec.out == "-" && spec.n_list.size() != 1) throw DomainError("hecke-spectrum to stdout takes one N");
    for (int N : spec.n_list) {
        std::vector<std::string> warns;
        auto sp = cached_length_spectrum(HeckeGroup(N), enumeration_options(spec), spec.cache_dir, &warns);
        const auto surf = hecke_surface(N, std::move(sp));
        if (spec.out == "-") {
            std::cout << dump_surface(surf, 2) << '\n';
        } else {
            std::filesystem::path p(spec.out);
            if (spec.n_list.size() > 1)
                p = p.parent_path() / (p.stem().string() + "_N" + std::to_string(N) + p.extension().string());
            if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
            save_surface(surf, p);
        }
        for (const auto& w : warns) std::cerr << "N=" << N << ": " << w << '\n';
    }
    return kExitOk;
}

}  // namespace hyptrace::cli
