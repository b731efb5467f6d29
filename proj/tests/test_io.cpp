#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include <hyptrace/io.hpp>

using namespace hyptrace;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hyptrace_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("surface round trip is bit exact", "[io]") {
    for (const char* name : {"genus2", "hecke5", "two_cone"}) {
        const auto s = load_surface(std::string(HYPTRACE_FIXTURES) + "/" + name + ".json");
        CHECK(parse_surface(dump_surface(s)) == s);
        const auto dir = scratch("roundtrip");
        save_surface(s, dir / "s.json");
        CHECK(load_surface(dir / "s.json") == s);
    }
    SurfaceData s;
    s.signature = {1, 0, {3}};
    s.spectrum.entries = {{0.1 + 0.2, 3}, {std::nextafter(1.0, 2.0), 1}};
    s.spectrum.completeness_radius = std::numeric_limits<double>::infinity();
    s.spectrum.convention = InverseConvention::identified;
    const auto j = to_json(s);
    CHECK(j.at("completeness_radius").is_null());
    CHECK(parse_surface(j.dump()) == s);
}

TEST_CASE("malformed input", "[io]") {
    CHECK_THROWS(parse_surface("{}"));
    CHECK_THROWS(parse_surface(R"({"genus":0,"cusps":1,"cones":[2,5],"spectrum":[[1.0]],"completeness_radius":0})"));
    CHECK_THROWS_AS(parse_surface(R"({"genus":0,"cusps":1,"cones":[2,5],"spectrum":[[2.0,1],[1.0,1]],"completeness_radius":0})"),
                    DomainError);
    CHECK_THROWS_AS(parse_surface(R"({"genus":0,"cusps":1,"cones":[2,5],"degenerating":[7],"spectrum":[],"completeness_radius":0})"),
                    DomainError);
    CHECK_THROWS_AS(parse_surface(R"({"genus":0,"cusps":1,"cones":[2,5],"spectrum":[],"completeness_radius":0,"convention":"x"})"),
                    DomainError);
    CHECK_THROWS_AS(load_surface("/nonexistent/surface.json"), std::runtime_error);
    const auto dir = scratch("bad");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_surface(dir / "bad.json"), std::runtime_error);
}

TEST_CASE("Hecke spectrum cache", "[io]") {
    EnumerationOptions opt;
    opt.max_word_len = 40;
    opt.trace_bound = 2.0 * std::cosh(3.0);
    CHECK(cache_file_name(HeckeGroup(5), opt) == "hecke_v1_N5_L40_B20.135323991555531_distinct.json");
    CHECK(cache_file_name(HeckeGroup::limit(), opt).rfind("hecke_v1_Ninf_L40_", 0) == 0);

    ::unsetenv("HYPTRACE_CACHE_DIR");
    const auto dir = scratch("cache");
    const auto fresh = cached_length_spectrum(HeckeGroup(5), opt, dir.string());
    const auto file = dir / cache_file_name(HeckeGroup(5), opt);
    REQUIRE(fs::exists(file));
    CHECK(fresh == enumerate_length_spectrum(HeckeGroup(5), opt.max_word_len, opt.trace_bound));

    // a hit reads the file: tamper with it and observe the change
    auto j = json::parse(std::ifstream(file));
    j["spectrum"][0][1] = 99;
    std::ofstream(file) << j.dump();
    CHECK(cached_length_spectrum(HeckeGroup(5), opt, dir.string()).entries[0].multiplicity == 99);

    // a stale version is recomputed
    j["version"] = kCacheVersion + 1;
    std::ofstream(file) << j.dump();
    CHECK(cached_length_spectrum(HeckeGroup(5), opt, dir.string()) == fresh);

    // the environment variable wins
    const auto env_dir = scratch("cache_env");
    ::setenv("HYPTRACE_CACHE_DIR", env_dir.c_str(), 1);
    (void)cached_length_spectrum(HeckeGroup(5), opt, dir.string());
    CHECK(fs::exists(env_dir / cache_file_name(HeckeGroup(5), opt)));
    ::unsetenv("HYPTRACE_CACHE_DIR");

    CHECK(resolve_cache_dir("").empty());
}
