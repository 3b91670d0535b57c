#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "soliton/config.hpp"
#include "soliton/report.hpp"

using namespace soliton;

TEST_CASE("defaults per command") {
    const RunConfig cigar = parse_config("", "cigar");
    CHECK(cigar.r_max == 50.0);
    CHECK(cigar.step == 1e-3);

    const RunConfig bryant = parse_config("", "bryant");
    CHECK(bryant.r_max == 100.0);
    CHECK(bryant.dim == 3);

    const RunConfig wing = parse_config("", "wing");
    CHECK(wing.alpha0 == 2.5);
    CHECK(wing.wing_nu == 257);
    CHECK(wing.wing_nv == 129);
}

TEST_CASE("overrides and comments") {
    const RunConfig cfg = parse_config("# comment line\n  i = 2   # trailing\n\nnodes = 128\n",
                                       "surface-flow");
    CHECK(cfg.i == 2.0);
    CHECK(cfg.nodes == 128);
}

TEST_CASE("bad input is rejected with line numbers") {
    SUBCASE("unknown key") {
        CHECK_THROWS_WITH_AS(parse_config("r_max = 10\nbogus = 1\n", "cigar"),
                             doctest::Contains("line 2: unknown key 'bogus'"),
                             std::invalid_argument);
    }
    SUBCASE("out-of-range wing angle") {
        CHECK_THROWS_WITH_AS(parse_config("alpha0 = 4.0\n", "wing"),
                             doctest::Contains("out of range"), std::invalid_argument);
    }
    SUBCASE("malformed line") {
        CHECK_THROWS_WITH_AS(parse_config("just words\n", "cigar"),
                             doctest::Contains("line 1"), std::invalid_argument);
    }
    SUBCASE("malformed number") {
        CHECK_THROWS_WITH_AS(parse_config("r_max = ten\n", "cigar"),
                             doctest::Contains("malformed number"), std::invalid_argument);
    }
    SUBCASE("bad model name") {
        CHECK_THROWS_AS(parse_config("model = torus\n", "verify"), std::invalid_argument);
    }
    SUBCASE("unknown command") {
        CHECK_THROWS_AS(parse_config("", "fly"), std::invalid_argument);
    }
}

TEST_CASE("report bundles are deterministic") {
    auto build = [] {
        Report rep;
        rep.add("b.csv", csv_table({"x", "y"}, {{1.0, 2.0}, {3.0, 4.5}}));
        rep.add("a.csv", csv_table({"t"}, {{0.125}}, "# alpha = 3"));
        return rep;
    };
    namespace fs = std::filesystem;
    const auto dir1 = fs::temp_directory_path() / "soliton_rep1";
    const auto dir2 = fs::temp_directory_path() / "soliton_rep2";
    const std::string m1 = write_report(build(), dir1.string());
    const std::string m2 = write_report(build(), dir2.string());
    CHECK(m1 == m2);
    CHECK(m1.find("a.csv") < m1.find("b.csv")); // sorted manifest

    std::ifstream in(dir1 / "a.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "t\n0.125\n# alpha = 3\n");
}

TEST_CASE("format_double round-trips") {
    for (double v : {1.0 / 3.0, 2.5e-17, -123456.789, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 12638187200555641996ull);
}
