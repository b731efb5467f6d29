#pragma once

// JSON form of SurfaceData / LengthSpectrum and the on-disk cache of Hecke spectra.
//
// Surface schema:
//   {"genus": g, "cusps": p, "cones": [q...], "degenerating": [q...],
//    "spectrum": [[length, multiplicity]...], "completeness_radius": R,
//    "convention": "distinct" | "identified"}
// "convention" is optional (default distinct). An infinite completeness radius is written
// as null. Doubles are written with 17 significant digits, so a round trip is bit-exact.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hecke.hpp"
#include "surface.hpp"

namespace hyptrace {

using json = nlohmann::json;

inline json spectrum_entries_to_json(const LengthSpectrum& s) {
    json arr = json::array();
    for (const auto& e : s.entries) arr.push_back(json::array({e.length, e.multiplicity}));
    return arr;
}

inline json radius_to_json(double r) { return std::isinf(r) ? json(nullptr) : json(r); }

inline double radius_from_json(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline json to_json(const SurfaceData& s) {
    return json{{"genus", s.signature.genus},
                {"cusps", s.signature.cusps},
                {"cones", s.signature.cone_orders},
                {"degenerating", s.degenerating_orders},
                {"spectrum", spectrum_entries_to_json(s.spectrum)},
                {"completeness_radius", radius_to_json(s.spectrum.completeness_radius)},
                {"convention", to_string(s.spectrum.convention)}};
}

inline LengthSpectrum spectrum_from_json(const json& j) {
    LengthSpectrum s;
    for (const auto& e : j.at("spectrum")) {
        if (!e.is_array() || e.size() != 2) throw DomainError("spectrum entries must be [length, multiplicity]");
        s.entries.push_back({e[0].get<double>(), e[1].get<long long>()});
    }
    s.completeness_radius = radius_from_json(j.at("completeness_radius"));
    if (j.contains("convention")) s.convention = parse_inverse_convention(j["convention"].get<std::string>());
    s.validate();
    return s;
}

inline SurfaceData surface_from_json(const json& j) {
    SurfaceData s;
    s.signature.genus = j.at("genus").get<int>();
    s.signature.cusps = j.at("cusps").get<int>();
    s.signature.cone_orders = j.at("cones").get<std::vector<int>>();
    s.degenerating_orders = j.value("degenerating", std::vector<int>{});
    s.spectrum = spectrum_from_json(j);
    s.validate();
    return s;
}

inline std::string dump_surface(const SurfaceData& s, int indent = -1) { return to_json(s).dump(indent); }

inline SurfaceData parse_surface(const std::string& text) { return surface_from_json(json::parse(text)); }

inline SurfaceData load_surface(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open surface fixture " + p.string());
    try {
        return surface_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed surface fixture " + p.string() + ": " + e.what());
    }
}

inline void save_surface(const SurfaceData& s, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << dump_surface(s, 2) << '\n';
}

// ---------------------------------------------------------------------------------------
// Hecke spectrum cache

inline constexpr int kCacheVersion = 1;

/// hecke_v1_N{N}_L{max_word_len}_B{trace_bound}_{convention}.json; N = inf for the limit group.
inline std::string cache_file_name(const HeckeGroup& g, const EnumerationOptions& opt) {
    char bound[64];
    std::snprintf(bound, sizeof bound, "%.17g", opt.trace_bound);
    return "hecke_v" + std::to_string(kCacheVersion) + "_N" + (g.is_limit() ? std::string("inf") : std::to_string(g.N())) +
           "_L" + std::to_string(opt.max_word_len) + "_B" + bound + "_" + to_string(opt.convention) + ".json";
}

/// HYPTRACE_CACHE_DIR overrides the given directory; empty means no caching.
inline std::filesystem::path resolve_cache_dir(const std::string& dir) {
    if (const char* env = std::getenv("HYPTRACE_CACHE_DIR"); env && *env) return env;
    return dir;
}

/// Enumerates (or loads) the length spectrum; warnings of a fresh enumeration go to `warnings`.
inline LengthSpectrum cached_length_spectrum(const HeckeGroup& g, const EnumerationOptions& opt,
                                             const std::string& cache_dir, std::vector<std::string>* warnings = nullptr) {
    const auto dir = resolve_cache_dir(cache_dir);
    std::filesystem::path file;
    if (!dir.empty()) {
        file = dir / cache_file_name(g, opt);
        if (std::filesystem::exists(file)) {
            std::ifstream in(file);
            try {
                const json j = json::parse(in);
                if (j.at("version").get<int>() == kCacheVersion) {
                    if (warnings)
                        for (const auto& w : j.value("warnings", std::vector<std::string>{})) warnings->push_back(w);
                    return spectrum_from_json(j);
                }
            } catch (const std::exception&) {
                // unreadable cache entry: recompute and overwrite
            }
        }
    }
    auto rep = enumerate_classes(g, opt);
    if (warnings) warnings->insert(warnings->end(), rep.warnings.begin(), rep.warnings.end());
    if (!file.empty()) {
        std::filesystem::create_directories(dir);
        json j{{"version", kCacheVersion},
               {"N", g.is_limit() ? json(nullptr) : json(g.N())},
               {"max_word_len", opt.max_word_len},
               {"trace_bound", opt.trace_bound},
               {"convention", to_string(opt.convention)},
               {"classes", rep.classes.size()},
               {"warnings", rep.warnings},
               {"spectrum", spectrum_entries_to_json(rep.spectrum)},
               {"completeness_radius", radius_to_json(rep.spectrum.completeness_radius)}};
        const auto tmp = file.string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << j.dump() << '\n';
        }
        std::filesystem::rename(tmp, file);
    }
    return rep.spectrum;
}

}  // namespace hyptrace
