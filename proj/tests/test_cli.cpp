#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "srs/cli.hpp"

using namespace srs::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("srs_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("help and version") {
    CHECK(call({"--help"}).code == kSuccess);
    const auto v = call({"--version"});
    CHECK(v.code == kSuccess);
    CHECK(v.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("argument errors exit with 2") {
    CHECK(call({}).code == kInvalidArguments);
    CHECK(call({"nonsense"}).code == kInvalidArguments);
    CHECK(call({"coverage", "--n", "5"}).code == kInvalidArguments);
    CHECK(call({"coverage", "--n", "5", "--m", "6", "--K", "1"}).code == kInvalidArguments);
    CHECK(call({"coverage", "--n", "x", "--m", "1", "--K", "1"}).code == kInvalidArguments);
    CHECK(call({"coverage", "--n", "5", "--m", "2", "--K", "1", "--mode", "guess"}).code == kInvalidArguments);
    CHECK(call({"genbound", "--n", "10", "--m", "2", "--K", "3", "--delta", "2"}).code == kInvalidArguments);
    CHECK(call({"train", "--benchmark", "pl-quadratic", "--m", "51"}).code == kInvalidArguments);
    CHECK(call({"train", "--benchmark", "nope"}).code == kInvalidArguments);
}

TEST_CASE("numeric mode rejections exit with 3") {
    CHECK(call({"coverage", "--n", "1000", "--m", "3", "--K", "2"}).code == kNumericModeRejected);
    CHECK(call({"coverage", "--n", "20", "--m", "10", "--K", "3", "--mode", "enumerate"}).code ==
          kNumericModeRejected);
    CHECK(call({"coverage", "--n", "1000", "--m", "3", "--K", "2", "--max-exact-n", "1000"}).code == kSuccess);
}

TEST_CASE("divergence exits with 4") {
    const auto r = call({"train", "--benchmark", "pl-quadratic", "--alpha", "100", "--K", "20", "--m", "5"});
    CHECK(r.code == kTrainingDiverged);
    CHECK(r.err.find("diverged") != std::string::npos);
}

TEST_CASE("coverage outputs") {
    const auto dir = scratch("coverage");
    const auto r = call({"coverage", "--n", "4", "--m", "2", "--K", "2", "--out", dir.string()});
    REQUIRE(r.code == kSuccess);
    CHECK(r.out.find("1/6") != std::string::npos);
    const auto csv = slurp(dir / "coverage_pmf.csv");
    CHECK(csv.rfind("n,m,K,l,probability_numerator,probability_denominator,probability_float\n", 0) == 0);
    CHECK(csv.find("4,2,2,3,2,3,0.66666666666666663\n") != std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("subcommand") == "coverage");
    CHECK(manifest.at("outputs").at("coverage_pmf.csv") == sha256_hex(csv));
    CHECK(manifest.at("schema_version") == kSchemaVersion);
    fs::remove_all(dir);
}

TEST_CASE("table and classical occupancy output") {
    const auto t = call({"coverage", "--table"});
    CHECK(t.code == kSuccess);
    for (const char* cell : {"40.1%", "64.2%", "78.5%", "65.1%", "87.8%", "95.8%", "89.3%", "98.8%", "99.9%"}) {
        CHECK(t.out.find(cell) != std::string::npos);
    }
    const auto c = call({"occupancy", "--classical", "--n", "4"});
    CHECK(c.out.find("25/3") != std::string::npos);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("replay reproduces every subcommand") {
    const std::vector<std::vector<std::string>> runs{
        {"coverage", "--n", "20", "--m", "5", "--K", "5", "--mode", "simulate", "--trials", "20000"},
        {"coverage", "--curve", "--n", "20", "--m", "2", "--K", "20", "--R", "1,10", "--runs", "200"},
        {"occupancy", "--n", "8", "--m", "2", "--s", "6", "--simulate", "--trials", "5000"},
        {"train", "--benchmark", "pl-quadratic", "--m", "10", "--K", "15", "--seeds", "3", "--verify-bound"},
        {"genbound", "--sweep", "--max-n", "6", "--max-K", "3"},
    };
    int i = 0;
    for (auto args : runs) {
        const auto dir = scratch("replay" + std::to_string(i++));
        args.insert(args.begin(), {"--seed", "123"});
        args.push_back("--out");
        args.push_back(dir.string());
        REQUIRE(call(args).code == kSuccess);
        const auto r = call({"replay", (dir / "manifest.json").string(), "--out", (dir / "again").string()});
        CHECK(r.code == kSuccess);
        CHECK(r.out.find("byte-identical") != std::string::npos);

        // Tamper with a recorded digest: replay must notice.
        auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        const auto name = manifest.at("outputs").begin().key();
        manifest["outputs"][name] = std::string(64, '0');
        std::ofstream(dir / "manifest.json") << manifest.dump(2);
        CHECK(call({"replay", (dir / "manifest.json").string(), "--out", (dir / "third").string()}).code ==
              kReplayMismatch);
        fs::remove_all(dir);
    }
}

TEST_CASE("seed changes simulated output") {
    const auto a = call({"--seed", "1", "coverage", "--n", "10", "--m", "3", "--K", "3", "--mode", "simulate",
                         "--trials", "1000"});
    const auto b = call({"--seed", "2", "coverage", "--n", "10", "--m", "3", "--K", "3", "--mode", "simulate",
                         "--trials", "1000"});
    const auto c = call({"coverage", "--n", "10", "--m", "3", "--K", "3", "--mode", "simulate", "--trials", "1000",
                         "--seed", "1"});
    CHECK(a.out != b.out);
    CHECK(a.out == c.out);
}

TEST_CASE("train with a CSV dataset") {
    const auto dir = scratch("dataset");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "data.csv");
        f << "x1,x2,y\n";
        for (int i = 0; i < 30; ++i) f << i % 5 << ',' << (i * 7) % 3 << ',' << (i % 5 + (i * 7) % 3 > 3) << '\n';
    }
    const auto r = call({"train", "--dataset", (dir / "data.csv").string(), "--model", "logistic", "--m", "10",
                         "--K", "5", "--alpha", "0.1", "--out", (dir / "out").string()});
    CHECK(r.code == kSuccess);
    CHECK(fs::exists(dir / "out" / "trace_000.csv"));
    CHECK(fs::exists(dir / "out" / "trace_mean.csv"));
    CHECK(call({"train", "--dataset", (dir / "data.csv").string(), "--alpha", "auto"}).code == kInvalidArguments);
    fs::remove_all(dir);
}

TEST_CASE("full-data reference and noise-free contraction report") {
    const auto r = call({"train", "--benchmark", "pl-quadratic", "--m", "n", "--K", "4", "--sampling", "reshuffle",
                         "--full-data-reference"});
    CHECK(r.code == kSuccess);
    CHECK(r.out.find("same sample order: yes") != std::string::npos);
    const auto c = call({"train", "--benchmark", "pl-quadratic", "--noise", "0", "--m", "10", "--K", "30",
                         "--verify-bound", "--bound", "pl"});
    CHECK(c.out.find("linear contraction") != std::string::npos);
    CHECK(c.out.find("FAIL") == std::string::npos);
}
