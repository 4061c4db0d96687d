#include "mcf/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

std::string cli_path()
{
    const char* env = std::getenv("MCF_CLI_BIN");
    REQUIRE(env != nullptr);
    return env;
}

int run(const std::string& args)
{
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("mcf_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path)
{
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ','))
            row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("ecker series CSV is monotone")
{
    const auto dir = fresh_dir("ecker");
    CHECK(run("--flow grim_reaper --r 1,2,4,8,16 --out " + dir.string() + " ecker") == 0);
    const auto rows = read_csv(dir / "ecker_grim_reaper.csv");
    REQUIRE(rows.size() == 6); // header + 5 radii
    CHECK(rows[0][0] == "kind");
    double prev = -1;
    for (size_t i = 1; i < rows.size(); ++i) {
        const double value = std::stod(rows[i][4]);
        CHECK(value >= prev - 1e-6);
        prev = value;
    }
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("huisken on the plane emits ones")
{
    const auto dir = fresh_dir("huisken");
    CHECK(run("--flow plane --t -0.5,-2,-8 --out " + dir.string() + " huisken") == 0);
    const auto rows = read_csv(dir / "huisken_plane.csv");
    REQUIRE(rows.size() == 4);
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][4]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("entropy of the unit-circle slice")
{
    const auto dir = fresh_dir("entropy");
    CHECK(run("--flow circle --t -0.5 --out " + dir.string() + " entropy") == 0);
    const auto rows = read_csv(dir / "entropy_circle.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.5203469).epsilon(1e-4));
}

TEST_CASE("verify exits zero on a self-shrinker")
{
    const auto dir = fresh_dir("verify");
    CHECK(run("--flow sphere2 --out " + dir.string() + " verify") == 0);
    CHECK(fs::exists(dir / "limits_sphere2.json"));
    CHECK(fs::exists(dir / "limits_sphere2_series.csv"));
    const std::string json_text = mcf::read_file((dir / "limits_sphere2.json").string());
    CHECK(json_text.find("\"verdict\": \"PASS\"") != std::string::npos);
}

TEST_CASE("determinism: identical config and seed give identical bytes")
{
    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    const std::string args = "--flow circle --r 0.5,1,2,4,8 --seed 42 ";
    CHECK(run(args + "--out " + dir1.string() + " ecker") == 0);
    CHECK(run(args + "--out " + dir2.string() + " ecker") == 0);
    CHECK(mcf::read_file((dir1 / "ecker_circle.csv").string()) ==
          mcf::read_file((dir2 / "ecker_circle.csv").string()));
}

TEST_CASE("threaded verify matches sequential output")
{
    const auto dir1 = fresh_dir("thr1");
    const auto dir2 = fresh_dir("thr2");
    CHECK(run("--flow circle --threads 1 --out " + dir1.string() + " verify") == 0);
    CHECK(run("--flow circle --threads 4 --out " + dir2.string() + " verify") == 0);
    CHECK(mcf::read_file((dir1 / "limits_circle_series.csv").string()) ==
          mcf::read_file((dir2 / "limits_circle_series.csv").string()));
}

TEST_CASE("flow-spec JSON selects and transforms a catalog entry")
{
    const auto dir = fresh_dir("spec");
    const std::string config = R"({
  "flow": {"name": "plane", "parameters": {"offset": [0, 0, 1]}},
  "t": [-1.0],
  "out": ")" + dir.string() + R"("
})";
    mcf::write_file((dir / "config.json").string(), config);
    CHECK(run("--config " + (dir / "config.json").string() + " huisken") == 0);
    const auto rows = read_csv(dir / "huisken_plane_recentered.csv");
    REQUIRE(rows.size() == 2);
    // plane at unit distance: exp(d^2 / 4t) = exp(-1/4)
    CHECK(std::stod(rows[1][4]) == doctest::Approx(std::exp(-0.25)).epsilon(1e-8));
}

TEST_CASE("unknown config keys are rejected with exit 2")
{
    const auto dir = fresh_dir("badcfg");
    mcf::write_file((dir / "config.json").string(),
                    R"({"flow": "plane", "t": [-1.0], "bogus_key": 1})");
    CHECK(run("--config " + (dir / "config.json").string() + " huisken") == 2);
    mcf::write_file((dir / "broken.json").string(), "{not json");
    CHECK(run("--config " + (dir / "broken.json").string() + " huisken") == 2);
    CHECK(run("--flow no_such_flow --t -1 huisken") == 2);
    CHECK(run("--flow plane huisken") == 2); // missing --t
}

TEST_CASE("mollifier suite columns")
{
    const auto dir = fresh_dir("mollifier");
    CHECK(run("--out " + dir.string() + " mollifier") == 0);
    const auto rows = read_csv(dir / "mollifier.csv");
    REQUIRE(rows.size() == 4); // header + default eps list
    double prev_alpha = -1e300;
    for (size_t i = 1; i < rows.size(); ++i) {
        const double alpha = std::stod(rows[i][1]);
        CHECK(alpha <= 0);
        CHECK(alpha > prev_alpha);
        prev_alpha = alpha;
        CHECK(std::stod(rows[i][2]) < 1e-6); // kernel identity residual
        CHECK(rows[i][3] == "0");            // sandwich violations
        CHECK(rows[i][4] == "1");
        CHECK(rows[i][5] == "1");
    }
}

TEST_CASE("manifest lists every output with its hash")
{
    const auto dir = fresh_dir("manifest");
    CHECK(run("--flow circle --t -1 --out " + dir.string() + " huisken") == 0);
    const std::string manifest = mcf::read_file((dir / "manifest.json").string());
    CHECK(manifest.find("huisken_circle.csv") != std::string::npos);
    const std::string csv = mcf::read_file((dir / "huisken_circle.csv").string());
    CHECK(manifest.find(mcf::fnv1a64_hex(csv)) != std::string::npos);
}

TEST_SUITE_END();
