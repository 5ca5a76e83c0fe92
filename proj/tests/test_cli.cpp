#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mwlab/arith_sieve.hpp"
#include "mwlab/report.hpp"

using namespace mwlab;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("mwlab_test_" + name);
}

}  // namespace

TEST_CASE("lemma 3 over every mask at lambda 12")
{
    auto r = run({"lemma-check", "--lemma", "3", "--lambda", "12", "--masks", "all"});
    CHECK(r.code == 0);
    auto m = parse_manifest(r.out);
    CHECK(m.reports.size() == 4096);
    CHECK(m.command == "lemma-check");
}

TEST_CASE("exit codes")
{
    auto big = run({"--lambda", "99", "sieve"});
    CHECK(big.code == 3);
    CHECK(big.err.find("bytes") != std::string::npos);
    CHECK(run({"sieve", "--lambda", "99"}).code == 3);
    CHECK(run({"lemma-check", "--lemma", "3", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"sieve"}).code == 2);
    CHECK(run({"lemma-check", "--lemma", "9", "--lambda", "6"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    // lambda = 2 fails the theorem bound
    CHECK(run({"theorem-scan", "--lambda", "2"}).code == 1);
}

TEST_CASE("memory budget")
{
    auto r = run({"--max-mem-gib", "0.000001", "spectrum", "--lambda", "16"});
    CHECK(r.code == 3);
    CHECK(r.err.find("bytes") != std::string::npos);
}

TEST_CASE("theorem scan csv")
{
    auto r = run({"theorem-scan", "--lambda-min", "8", "--lambda-max", "16", "--format", "csv"});
    CHECK(r.code == 0);
    auto reports = parse_csv(r.out);
    REQUIRE(reports.size() == 9);
    for (int i = 0; i < 9; ++i) CHECK(reports[static_cast<std::size_t>(i)].params["lambda"] == 8 + i);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == kCsvHeader);
}

TEST_CASE("identical argv gives identical bytes")
{
    const std::vector<std::string> args{"--seed", "7", "lemma-check", "--lemma", "6", "--lambda", "10",
                                        "--masks", "random:20"};
    auto a = run(args);
    auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto c = run({"--seed", "8", "lemma-check", "--lemma", "6", "--lambda", "10", "--masks", "random:20"});
    CHECK(c.out != a.out);
}

TEST_CASE("sieve dump feeds spectrum")
{
    const auto path = temp_path("mu10.aws1");
    auto s = run({"--lambda", "10", "--out", path.string(), "sieve", "--kind", "liouville"});
    CHECK(s.code == 0);
    std::ifstream in(path, std::ios::binary);
    auto seq = read_sequence(in);
    CHECK(seq.lambda() == 10);
    CHECK(seq.kind() == FunctionKind::liouville);
    auto sp = run({"spectrum", "--in", path.string(), "--top", "3"});
    CHECK(sp.code == 0);
    auto m = parse_manifest(sp.out);
    CHECK(m.summary["top"].size() == 3);
    CHECK(m.reports.size() == 1);
    std::filesystem::remove(path);
}

TEST_CASE("out path picks the format by extension")
{
    const auto path = temp_path("scan.csv");
    auto r = run({"--out", path.string(), "carry-rate", "--mu", "4", "--rho", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(parse_csv(text.str()).size() == 2);
    std::filesystem::remove(path);
}

TEST_CASE("sum subcommands")
{
    CHECK(run({"bilinear", "--mu", "3", "--nu", "5", "--mask", "{6,7}", "--beta", "random"}).code == 0);
    CHECK(run({"quadform", "--mu", "3", "--nu", "5", "--mask", "0b1000100", "--rho", "1"}).code == 0);
    CHECK(run({"type1", "--mu", "4", "--nu", "10", "--mask", "18529"}).code == 0);
    CHECK(run({"type1", "--mu", "3", "--nu", "9", "--mask", "{3,7,9}", "--test", "frequency"}).code == 0);
    CHECK(run({"--lambda", "14", "split", "--mu", "2", "--mask", "{12,13}", "--H", "4"}).code == 0);
    CHECK(run({"bilinear", "--mu", "3", "--nu", "5", "--mask", "{40}"}).code == 2);
    CHECK(run({"bilinear", "--mu", "3", "--nu", "5", "--mask", "zz"}).code == 2);
}

TEST_CASE("scan from a config file")
{
    const auto path = temp_path("scan.json");
    {
        std::ofstream f(path);
        f << R"({"lambda_min": 6, "lambda_max": 7, "masks": "structured", "lemmas": ["L1", "L3"], "seed": 5})";
    }
    auto r = run({"scan", "--config", path.string()});
    CHECK(r.code == 0);
    auto m = parse_manifest(r.out);
    CHECK(m.seed == 5);
    CHECK(m.config["lambda_max"] == 7);
    CHECK(run({"scan", "--config", "/nonexistent.json"}).code == 2);
    std::filesystem::remove(path);
}
