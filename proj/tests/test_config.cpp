#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lightcone/config.hpp"
#include "lightcone/io.hpp"

using namespace lightcone;

TEST_CASE("experiment config") {
    SECTION("defaults validate and round-trip through JSON") {
        ExperimentConfig cfg;
        cfg.validate();
        ExperimentConfig back = config_from_json(cfg.to_json());
        CHECK(back.canonical() == cfg.canonical());
        CHECK(back.hash() == cfg.hash());
    }
    SECTION("hash is 64 hex chars and value-sensitive") {
        ExperimentConfig a, b;
        b.seed = 2;
        CHECK(a.hash().size() == 64);
        CHECK(a.hash() != b.hash());
        CHECK(a.hash().find_first_not_of("0123456789abcdef") == std::string::npos);
    }
    SECTION("key order in the input does not change the hash") {
        json j1 = json::parse(R"({"grid": {"M": 8, "dk": 0.5}, "seed": 7})");
        json j2 = json::parse(R"({"seed": 7, "grid": {"dk": 0.5, "M": 8}})");
        CHECK(config_from_json(j1).hash() == config_from_json(j2).hash());
    }
    SECTION("unknown keys are hard errors naming the key") {
        json j = json::parse(R"({"grid": {"M": 8, "banana": 1}})");
        CHECK_THROWS_WITH(config_from_json(j),
                          Catch::Matchers::ContainsSubstring("banana") &&
                              Catch::Matchers::ContainsSubstring("grid"));
        json j2 = json::parse(R"({"gird": {}})");
        CHECK_THROWS_WITH(config_from_json(j2), Catch::Matchers::ContainsSubstring("gird"));
    }
    SECTION("invalid values are rejected on load") {
        CHECK_THROWS(config_from_json(json::parse(R"({"fock": {"n_max": 0}})")));
        CHECK_THROWS(config_from_json(json::parse(R"({"evolve": {"t0": 0.5}})")));
        CHECK_THROWS(config_from_json(json::parse(R"({"probe": {"gamma": 0.5}})")));
        CHECK_THROWS(config_from_json(json::parse(R"({"grid": {"mode": "spherical"}})")));
    }
    SECTION("scalar c promotes to a one-element list") {
        auto cfg = config_from_json(json::parse(R"({"probe": {"c": 2.0}})"));
        REQUIRE(cfg.c_list.size() == 1);
        CHECK(cfg.c_list[0] == 2.0);
        CHECK(cfg.probe.c == 2.0);
    }
    SECTION("omitted dx defaults to the commensurate spacing") {
        auto cfg = config_from_json(json::parse(R"({"model": {"Nx": 8}, "grid": {"dk": 0.5}})"));
        CHECK(cfg.model.dx == ModelSpec::commensurate_dx(8, 0.5));
    }
    SECTION("load_config reports parse errors and missing files") {
        CHECK_THROWS(load_config("/nonexistent/path.json"));
        auto tmp = std::filesystem::temp_directory_path() / "lc_bad_config.json";
        std::ofstream(tmp) << "{ not json";
        CHECK_THROWS_WITH(load_config(tmp.string()),
                          Catch::Matchers::ContainsSubstring("parse error"));
        std::filesystem::remove(tmp);
    }
}

TEST_CASE("trajectory csv") {
    TrajectoryTable tab;
    tab.times = {1.0, 2.0, 4.0};
    tab.norms = {1.0, 1.0, 1.0};
    tab.energies = {0.5, 0.5, 0.5};
    tab.observables["cone_mass_c1.5"] = {0.3, 0.2, 0.1};
    tab.observables["banded"] = {1e-17, 0.123456789012345678, 3.0};

    SECTION("header and column order are canonical") {
        std::string csv = trajectory_csv(tab);
        CHECK(csv.rfind("t,norm,energy,banded,cone_mass_c1.5\n", 0) == 0);
    }
    SECTION("17 significant digits round-trip exactly") {
        std::istringstream in(trajectory_csv(tab));
        TrajectoryTable back = parse_trajectory_csv(in);
        REQUIRE(back.rows() == 3);
        CHECK(back.times == tab.times);
        CHECK(back.observables.at("banded") == tab.observables.at("banded"));
        CHECK(trajectory_csv(back) == trajectory_csv(tab));
    }
    SECTION("malformed inputs are rejected") {
        std::istringstream empty("");
        CHECK_THROWS(parse_trajectory_csv(empty));
        std::istringstream badhead("time,norm,energy\n1,1,0.5\n");
        CHECK_THROWS(parse_trajectory_csv(badhead));
        std::istringstream badcell("t,norm,energy\n1,abc,0.5\n");
        CHECK_THROWS_WITH(parse_trajectory_csv(badcell),
                          Catch::Matchers::ContainsSubstring("abc"));
        std::istringstream shortrow("t,norm,energy\n1,1\n");
        CHECK_THROWS(parse_trajectory_csv(shortrow));
        std::istringstream unsorted("t,norm,energy,zeta,alpha\n1,1,0.5,0,0\n");
        CHECK_THROWS(parse_trajectory_csv(unsorted));
    }
    SECTION("column length mismatch is rejected") {
        TrajectoryTable bad = tab;
        bad.observables["banded"].pop_back();
        CHECK_THROWS(trajectory_csv(bad));
    }
    SECTION("atomic write leaves no temp file and round-trips") {
        auto dir = std::filesystem::temp_directory_path() / "lc_io_test";
        auto path = dir / "traj.csv";
        atomic_write(path, trajectory_csv(tab));
        CHECK(!std::filesystem::exists(path.string() + ".tmp"));
        TrajectoryTable back = load_trajectory_csv(path);
        CHECK(trajectory_csv(back) == trajectory_csv(tab));
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // length > one block exercises multi-block padding
    CHECK(sha256_hex(std::string(1000, 'a')) ==
          "41edece42d63e8d9bf515a9ba6932e1c20cbc9f5a5d134645adb5db1b9737ea3");
}
