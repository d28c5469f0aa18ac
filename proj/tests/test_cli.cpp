#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "teich/io.hpp"
#include "teich/pants.hpp"
#include "test_util.hpp"

using namespace teich;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "teich_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(TEICH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("cli build writes a valid representation") {
    fs::path dir = work_dir();
    write(dir / "three_cusp.json",
          R"({"pants": [{"cuffs": [{"cusp": true}, {"cusp": true}, {"cusp": true}]}]})");
    CHECK(run_cli("build " + (dir / "three_cusp.json").string() + " --out " + dir.string()) == 0);
    GroupRepresentation rep = load_representation(dir / "three_cusp_rep.json");
    CHECK(rep.peripheral_words.size() == 3);
    for (const Word& p : rep.peripheral_words)
        CHECK(evaluate_word(rep, p).classify(1e-6) == ElementClass::Parabolic);
}

TEST_CASE("cli build rejects bad input with exit 2") {
    fs::path dir = work_dir();
    write(dir / "mismatch.json",
          R"({"pants": [{"cuffs": [{"length": 1.0}, {"length": 2.0}, {"cusp": true}]}],
              "gluings": [{"from": [0, 0], "to": [0, 1], "twist": 0}]})");
    CHECK(run_cli("build " + (dir / "mismatch.json").string() + " --out " + dir.string()) == 2);

    write(dir / "empty.json", "");
    CHECK(run_cli("build " + (dir / "empty.json").string() + " --out " + dir.string()) == 2);
}

TEST_CASE("cli bmap on matching and broken pairs") {
    fs::path dir = work_dir();
    write(dir / "torus.json",
          R"({"pants": [{"cuffs": [{"length": 1.0}, {"length": 1.0}, {"cusp": true}]}],
              "gluings": [{"from": [0, 0], "to": [0, 1], "twist": 0}]})");
    REQUIRE(run_cli("build " + (dir / "torus.json").string() + " --out " + dir.string()) == 0);
    fs::path rep = dir / "torus_rep.json";

    SECTION("identical representations give the identity map") {
        CHECK(run_cli("bmap " + rep.string() + " " + rep.string() + " --depth 4 --svg --out " +
                      dir.string()) == 0);
        CHECK(fs::exists(dir / "bmap.csv"));
        CHECK(fs::exists(dir / "bmap.svg"));
    }

    SECTION("twist pair passes the monotonicity verdict") {
        write(dir / "torus05.json",
              R"({"pants": [{"cuffs": [{"length": 1.0}, {"length": 1.0}, {"cusp": true}]}],
                  "gluings": [{"from": [0, 0], "to": [0, 1], "twist": 0.5}]})");
        REQUIRE(run_cli("build " + (dir / "torus05.json").string() + " --out " + dir.string()) ==
                0);
        CHECK(run_cli("bmap " + rep.string() + " " + (dir / "torus05_rep.json").string() +
                      " --depth 6 --out " + dir.string()) == 0);
    }

    SECTION("unrelated input fails with the type or monotonicity code") {
        write(dir / "random.json",
              R"({"generators": ["A", "B"],
                  "matrices": {"A": [1.7, 0.3, 0.4, 0.7], "B": [1.1, -0.8, 0.25, 0.727272727272727]}})");
        int code = run_cli("bmap " + rep.string() + " " + (dir / "random.json").string() +
                           " --depth 5 --out " + dir.string());
        CHECK((code == 3 || code == 4));
    }
}

TEST_CASE("cli converge on a constant manifest") {
    fs::path dir = work_dir() / "conv";
    fs::create_directories(dir);
    write(dir / "torus.json",
          R"({"pants": [{"cuffs": [{"length": 1.0}, {"length": 1.0}, {"cusp": true}]}],
              "gluings": [{"from": [0, 0], "to": [0, 1], "twist": 0}]})");
    REQUIRE(run_cli("build " + (dir / "torus.json").string() + " --out " + dir.string()) == 0);
    // Canonical reference for the session.
    GroupRepresentation ref = canonical_reference(load_representation(dir / "torus_rep.json"));
    save_representation(dir / "ref.json", ref);
    write(dir / "ms.json", R"({"reference": "ref.json", "target": "torus_rep.json"})");
    write(dir / "manifest.json", R"({"structures": ["ms.json", "ms.json"]})");
    CHECK(run_cli("converge " + (dir / "manifest.json").string() + " " +
                  (dir / "ms.json").string() + " --depth 4 --out " + dir.string()) == 0);
    std::ifstream csv(dir / "converge.csv");
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        double c, b;
        int i;
        REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf", &i, &c, &b) == 3);
        CHECK(c < 1e-10);
        CHECK(b < 1e-10);
    }
    CHECK(rows == 2);
}

TEST_CASE("cli act applies presets and rejects malformed classes") {
    fs::path dir = work_dir() / "act";
    fs::create_directories(dir);
    write(dir / "torus.json",
          R"({"pants": [{"cuffs": [{"length": 1.0}, {"length": 1.0}, {"cusp": true}]}],
              "gluings": [{"from": [0, 0], "to": [0, 1], "twist": 0}]})");
    REQUIRE(run_cli("build " + (dir / "torus.json").string() + " --out " + dir.string()) == 0);
    GroupRepresentation ref = canonical_reference(load_representation(dir / "torus_rep.json"));
    save_representation(dir / "ref.json", ref);
    write(dir / "ms.json", R"({"reference": "ref.json", "target": "ref.json"})");
    write(dir / "ta.json", R"({"images": {"B": "B A"}, "inverse_images": {"B": "B A'"}})");
    CHECK(run_cli("act " + (dir / "ms.json").string() + " " + (dir / "ta.json").string() +
                  " --depth 5 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "acted_rep.json"));
    CHECK_NOTHROW(load_representation(dir / "acted_rep.json"));

    write(dir / "id.json", R"({"images": {}, "inverse_images": {}})");
    CHECK(run_cli("act " + (dir / "ms.json").string() + " " + (dir / "id.json").string() +
                  " --depth 4 --out " + dir.string()) == 0);

    write(dir / "bad.json", R"({"images": {"B": "A"}, "inverse_images": {"B": "B"}})");
    CHECK(run_cli("act " + (dir / "ms.json").string() + " " + (dir / "bad.json").string() +
                  " --depth 4 --out " + dir.string()) == 5);
}
