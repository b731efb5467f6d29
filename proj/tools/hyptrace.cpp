// hyptrace: grid runs and checks for cone and surface heat traces.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include <hyptrace/cli.hpp>

namespace {

using hyptrace::cli::SweepSpec;

void add_common(CLI::App* sub, SweepSpec& spec) {
    sub->add_option("--out", spec.out, "CSV output path ('-' for stdout); a .json sidecar is written next to it");
    sub->add_option("--rel-tol", spec.quad.rel_tol, "Relative quadrature tolerance")->capture_default_str();
    sub->add_option("--threads", spec.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void add_hecke(CLI::App* sub, SweepSpec& spec, std::string& convention) {
    sub->add_option("--grid-n", spec.n_list, "Hecke indices N >= 3")->delimiter(',')->capture_default_str();
    sub->add_option("--cache-dir", spec.cache_dir,
                    "Spectrum cache directory (HYPTRACE_CACHE_DIR overrides; empty disables)");
    sub->add_option("--max-word-len", spec.max_word_len, "Longest canonical word over {S, T, T^-1}")
        ->capture_default_str();
    sub->add_option("--trace-bound", spec.trace_bound, "Largest |trace| enumerated")->capture_default_str();
    sub->add_option("--convention-inverse-classes", convention,
                    "Count a class and its inverse separately (distinct) or once (identified)")
        ->check(CLI::IsMember({"distinct", "identified"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyptrace: heat kernels and heat traces on hyperbolic cones and surfaces.\n"
                 "Exit status: 0 ok, 2 tolerance violation, 3 quadrature failure."};
    app.require_subcommand(1);
    SweepSpec spec;
    std::string convention = "distinct";

    auto* pc = app.add_subcommand(
        "parseval-check",
        "Compare the two elliptic-trace forms of a cone C_q:\n"
        "  e^{-t/4}/(q sqrt(16 pi t)) sum_n int_0^inf e^{-u^2/4t} cosh(u/2)/(sinh^2(u/2)+sin^2(n pi/q)) du\n"
        "  sum_n e^{-t/4}/(2q sin(n pi/q)) int_R e^{-2 pi n r/q - t r^2}/(1+e^{-2 pi r}) dr");
    spec.q_list = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    spec.t_list = {0.1, 1.0, 10.0};
    pc->add_option("--grid-q", spec.q_list, "Cone orders q >= 1")->delimiter(',')->capture_default_str();
    pc->add_option("--grid-t", spec.t_list, "Times t > 0")->delimiter(',')->capture_default_str();
    pc->add_option("--tolerance", spec.tolerance, "Largest accepted relative difference")->capture_default_str();
    add_common(pc, spec);

    auto* bc = app.add_subcommand(
        "bound-check",
        "Check |I_{q,delta}(z)| <= e^{-t/4}/sqrt(pi|z|) (delta/2pi)^{-2 eta gamma} [zeta(1+2 eta gamma) + pi],\n"
        "eta = t/(4|z|^2), gamma = log(1 + (delta/2pi)^2), for the trace over the cone outside C_{q,delta}.");
    std::vector<int> bq{3, 10, 100};
    std::vector<double> bd{0.5, 1.0, 2.0}, bt{0.5, 1.0}, bs{0.0, 1.0, 5.0};
    bc->add_option("--grid-q", bq, "Cone orders q >= 2")->delimiter(',')->capture_default_str();
    bc->add_option("--grid-delta", bd, "Truncation levels delta > 0")->delimiter(',')->capture_default_str();
    bc->add_option("--grid-t", bt, "Re z > 0")->delimiter(',')->capture_default_str();
    bc->add_option("--grid-s", bs, "Im z")->delimiter(',')->capture_default_str();
    add_common(bc, spec);

    auto* ds = app.add_subcommand(
        "degeneration-sweep",
        "Reduced trace HTr + ETr - DTr of the Hecke surfaces G_N (cones 2 and N, the N-cone\n"
        "degenerating) from enumerated length spectra, over N and z = t + is.");
    std::vector<int> dn{3, 6, 12, 24, 48};
    std::vector<double> dt{1.0}, dss{0.0};
    ds->add_option("--grid-t", dt, "Re z > 0")->delimiter(',')->capture_default_str();
    ds->add_option("--grid-s", dss, "Im z")->delimiter(',')->capture_default_str();
    add_common(ds, spec);
    add_hecke(ds, spec, convention);

    auto* se = app.add_subcommand(
        "stf-eval",
        "Geometric side of the compact Selberg trace formula with H(r) = e^{-z(r^2+1/4)}:\n"
        "  (vol/4pi) int H(r) tanh(pi r) r dr + sum l/(2 sinh(n l/2)) H^(n l)\n"
        "  + sum_cones sum_n 1/(2q sin(n pi/q)) int H(r) e^{-2 pi n r/q}/(1+e^{-2 pi r}) dr,\n"
        "against the standard trace HTr + ETr + vol K_H(z,0); with --eigenvalues also sum H(r_n).");
    std::vector<double> st{1.0}, ss{0.0};
    se->add_option("--fixture", spec.fixture, "Surface JSON")->required()->check(CLI::ExistingFile);
    se->add_option("--eigenvalues", spec.eigenvalues, "Whitespace-separated Laplace eigenvalues")
        ->check(CLI::ExistingFile);
    se->add_option("--grid-t", st, "Re z > 0")->delimiter(',')->capture_default_str();
    se->add_option("--grid-s", ss, "Im z")->delimiter(',')->capture_default_str();
    se->add_option("--tolerance", spec.tolerance, "Largest accepted relative difference")->capture_default_str();
    add_common(se, spec);

    auto* hs = app.add_subcommand("hecke-spectrum",
                                  "Enumerate primitive hyperbolic classes of G_N and write the Hecke surface JSON.");
    std::vector<int> hn{5};
    add_common(hs, spec);
    add_hecke(hs, spec, convention);

    CLI11_PARSE(app, argc, argv);

    try {
        spec.convention = hyptrace::parse_inverse_convention(convention);
        if (pc->parsed()) {
            spec.command = "parseval-check";
            return hyptrace::cli::cmd_parseval_check(spec);
        }
        if (bc->parsed()) {
            spec.command = "bound-check";
            spec.q_list = bq, spec.delta_list = bd, spec.t_list = bt, spec.s_list = bs;
            return hyptrace::cli::cmd_bound_check(spec);
        }
        if (ds->parsed()) {
            spec.command = "degeneration-sweep";
            if (spec.n_list.empty()) spec.n_list = dn;
            spec.t_list = dt, spec.s_list = dss;
            return hyptrace::cli::cmd_degeneration_sweep(spec);
        }
        if (se->parsed()) {
            spec.command = "stf-eval";
            spec.t_list = st, spec.s_list = ss;
            return hyptrace::cli::cmd_stf_eval(spec);
        }
        if (hs->parsed()) {
            spec.command = "hecke-spectrum";
            if (spec.n_list.empty()) spec.n_list = hn;
            return hyptrace::cli::cmd_hecke_spectrum(spec);
        }
    } catch (const hyptrace::QuadratureFailure& e) {
        std::cerr << "hyptrace: " << e.what() << '\n';
        return hyptrace::cli::kExitQuadrature;
    } catch (const std::exception& e) {
        std::cerr << "hyptrace: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
