#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using Json = nlohmann::json;

namespace {

int lab(const std::string& args) {
    const std::string cmd = std::string(BOOMERANG_LAB_BIN) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Json load(const std::string& path) {
    std::ifstream in(path);
    return Json::parse(in);
}

std::string tmp(const char* name) { return std::string("cli_test_") + name; }

}  // namespace

TEST_CASE("zebra-check on a balanced commutator") {
    const auto out = tmp("zc.json");
    REQUIRE(lab("zebra-check --word \"a b1 a^-1 b1^-1\" --trials 100 --out " + out) == 0);
    Json r = load(out);
    CHECK(r["passed"] == true);
    const auto& items = r["suites"][0]["certificates"]["items"];
    REQUIRE(items.size() == 100);
    for (const auto& c : items) CHECK(c["k"] == 0);
}

TEST_CASE("unbalanced word certificates carry k = |c_a|") {
    const auto out = tmp("zc3.json");
    REQUIRE(lab("zebra-check --word \"a^2 b1 a b2\" --trials 10 --out " + out) == 0);
    for (const auto& c : load(out)["suites"][0]["certificates"]["items"]) CHECK(c["k"] == 3);
}

TEST_CASE("configuration errors exit 2") {
    CHECK(lab("zebra-check --word \"a a^-1 b1\"") == 2);
    CHECK(lab("zebra-check --word \"a q1\"") == 2);
    CHECK(lab("zebra-check --word \"a a^-1 b1\" --auto-reduce --trials 2") == 0);
    CHECK(lab("suite --scale enormous") == 2);
    CHECK(lab("odometer --space '{\"q\":2}'") == 2);
    CHECK(lab("odometer --set '{\"depth\":2,\"classes\":[9]}'") == 2);
    CHECK(lab("nonsense") == 2);
    CHECK(lab("symz --trials 1 --format xml") == 2);
    CHECK(std::system((std::string("BOOMERANG_LAB_THREADS=0 ") + BOOMERANG_LAB_BIN + " symz --trials 1 >/dev/null 2>&1").c_str()) != 0);
}

TEST_CASE("reports replay to identical certificates") {
    const auto a = tmp("bo.json"), b = tmp("bo2.json");
    REQUIRE(lab("boomerang --seed 3 --reps 6 --out " + a) == 0);
    REQUIRE(lab("replay " + a + " --out " + b) == 0);
    CHECK(load(a)["suites"].dump() == load(b)["suites"].dump());
    CHECK(load(a)["replay"]["argv"][0] == "boomerang");
}

TEST_CASE("thread count does not change certificates") {
    const auto a = tmp("t1.json"), b = tmp("t4.json");
    const std::string bin = BOOMERANG_LAB_BIN;
    REQUIRE(std::system(("BOOMERANG_LAB_THREADS=1 " + bin + " symz --trials 20 --out " + a).c_str()) == 0);
    REQUIRE(std::system(("BOOMERANG_LAB_THREADS=4 " + bin + " symz --trials 20 --out " + b).c_str()) == 0);
    CHECK(load(a)["suites"].dump() == load(b)["suites"].dump());
}

TEST_CASE("csv rows") {
    const auto out = tmp("fg.csv");
    REQUIRE(lab("fullgroup --check dazzle --trials 4 --format csv --out " + out) == 0);
    std::ifstream in(out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "suite,parameter,value");
    CHECK(row == "dazzle certificates,passed,true");
}
