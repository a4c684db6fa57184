#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "test_support.hpp"

// SHARDSTOCK_CLI_PATH is injected by the build
namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + SHARDSTOCK_CLI_PATH " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::size_t line_count(const std::string& text) {
    std::size_t lines = 0;
    for (const char c : text) lines += c == '\n';
    return lines;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("gen writes the dataset pair and reports sizes") {
    testsup::TempDir tmp;
    const auto res =
        run_cli("gen --count 1000 --seed 7 --out " + q(tmp.file("inv")));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("records=1000") != std::string::npos);

    const std::string csv = testsup::read_file(tmp.file("inv.csv"));
    const std::string dat = testsup::read_file(tmp.file("inv.dat"));
    CHECK(line_count(csv) == 1001);  // header + rows
    CHECK(line_count(dat) == 1000);
}

TEST_CASE("gen with zero records") {
    testsup::TempDir tmp;
    const auto res = run_cli("gen --count 0 --out " + q(tmp.file("inv")));
    CHECK(res.exit_code == 0);
    CHECK(testsup::read_file(tmp.file("inv.csv")) == "bo_ISBN13,bo_price,bo_quantity\n");
    CHECK(testsup::read_file(tmp.file("inv.dat")).empty());
}

TEST_CASE("gen into an unwritable location exits 2") {
    const auto res = run_cli("gen --count 10 --out /nonexistent-dir/prefix");
    CHECK(res.exit_code == 2);
}

TEST_CASE("apply: full-coverage run reports applied=N missing=0 and exits 0") {
    testsup::TempDir tmp;
    REQUIRE(run_cli("gen --count 1000 --seed 7 --out " + q(tmp.file("inv"))).exit_code == 0);

    const auto res = run_cli("apply --engine memory_parallel --threads 3 --dataset " +
                             q(tmp.file("inv.csv")) + " --stock " + q(tmp.file("inv.dat")) +
                             " --out " + q(tmp.file("updated.csv")));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("applied=1000 missing=0") != std::string::npos);
    CHECK(res.out.find("engine=memory_parallel") != std::string::npos);
    CHECK(res.out.find("total_ms=") != std::string::npos);

    // write-back is loadable and the same size
    CHECK(line_count(testsup::read_file(tmp.file("updated.csv"))) == 1001);
}

TEST_CASE("apply: identical flags give identical outputs modulo timing lines") {
    testsup::TempDir tmp;
    REQUIRE(run_cli("gen --count 500 --seed 9 --out " + q(tmp.file("inv"))).exit_code == 0);
    const std::string cmd = "apply --engine memory_serial --dataset " + q(tmp.file("inv.csv")) +
                            " --stock " + q(tmp.file("inv.dat")) + " --out " +
                            q(tmp.file("updated.csv"));
    const auto first = run_cli(cmd);
    const std::string first_csv = testsup::read_file(tmp.file("updated.csv"));
    const auto second = run_cli(cmd);
    const std::string second_csv = testsup::read_file(tmp.file("updated.csv"));

    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(first_csv == second_csv);
    CHECK(first.out.substr(0, first.out.find("load_ms")) ==
          second.out.substr(0, second.out.find("load_ms")));
}

TEST_CASE("apply: disk baseline writes a valid fixed store") {
    testsup::TempDir tmp;
    REQUIRE(run_cli("gen --count 200 --seed 3 --out " + q(tmp.file("inv"))).exit_code == 0);
    const auto res = run_cli("apply --engine disk_baseline --flush-every 50 --dataset " +
                             q(tmp.file("inv.csv")) + " --stock " + q(tmp.file("inv.dat")) +
                             " --out " + q(tmp.file("updated.bin")));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("applied=200 missing=0") != std::string::npos);
    const shardstock::FixedStoreFile file(tmp.file("updated.bin"));
    CHECK(file.record_count() == 200);
}

TEST_CASE("apply: nonexistent stock path exits 2") {
    testsup::TempDir tmp;
    REQUIRE(run_cli("gen --count 10 --out " + q(tmp.file("inv"))).exit_code == 0);
    const auto res = run_cli("apply --dataset " + q(tmp.file("inv.csv")) + " --stock " +
                             q(tmp.file("no-such.dat")) + " --out " + q(tmp.file("o.csv")));
    CHECK(res.exit_code == 2);
}

TEST_CASE("apply: unknown engine exits 2") {
    testsup::TempDir tmp;
    REQUIRE(run_cli("gen --count 10 --out " + q(tmp.file("inv"))).exit_code == 0);
    const auto res = run_cli("apply --engine warp_drive --dataset " + q(tmp.file("inv.csv")) +
                             " --stock " + q(tmp.file("inv.dat")) + " --out " + q(tmp.file("o")));
    CHECK(res.exit_code == 2);
}

TEST_CASE("apply: majority-malformed stock breaches the threshold, exit 1") {
    testsup::TempDir tmp;
    testsup::write_file(tmp.file("inv.csv"), testsup::kSampleCsv);
    testsup::write_file(tmp.file("bad.dat"),
                        "garbage line one\n"
                        "garbage line two\n"
                        "9780000004381$3.93$495$\n");
    const auto res = run_cli("apply --dataset " + q(tmp.file("inv.csv")) + " --stock " +
                             q(tmp.file("bad.dat")) + " --out " + q(tmp.file("o.csv")));
    CHECK(res.exit_code == 1);
    CHECK(res.out.find("stock_malformed=2") != std::string::npos);
}

TEST_CASE("apply: minority-malformed stock is reported but succeeds") {
    testsup::TempDir tmp;
    testsup::write_file(tmp.file("inv.csv"), testsup::kSampleCsv);
    testsup::write_file(tmp.file("mixed.dat"),
                        "9780000004381$3.93$495$\n"
                        "garbage\n"
                        "9780000010457$1.05$3$\n");
    const auto res = run_cli("apply --dataset " + q(tmp.file("inv.csv")) + " --stock " +
                             q(tmp.file("mixed.dat")) + " --out " + q(tmp.file("o.csv")));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("applied=2") != std::string::npos);
    CHECK(res.out.find("stock_malformed=1") != std::string::npos);
}

TEST_CASE("SHARDSTOCK_THREADS sets the default; the flag wins") {
    testsup::TempDir tmp;
    REQUIRE(run_cli("gen --count 50 --out " + q(tmp.file("inv"))).exit_code == 0);
    const std::string tail = " --dataset " + q(tmp.file("inv.csv")) + " --stock " +
                             q(tmp.file("inv.dat")) + " --out " + q(tmp.file("o.csv"));

    const auto from_env = run_cli("apply" + tail, "SHARDSTOCK_THREADS=2 ");
    CHECK(from_env.exit_code == 0);
    CHECK(from_env.out.find("threads=2\n") != std::string::npos);

    const auto flag_wins = run_cli("apply --threads 1" + tail, "SHARDSTOCK_THREADS=2 ");
    CHECK(flag_wins.exit_code == 0);
    CHECK(flag_wins.out.find("threads=1\n") != std::string::npos);
}

TEST_CASE("verify: the three engines agree on a generated pair") {
    testsup::TempDir tmp;
    const auto res = run_cli("verify --count 2000 --seed 5 --threads 2 --flush-every 500 --out " +
                             q(tmp.file("work")));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("verify=ok") != std::string::npos);
}

TEST_CASE("verify: an injected engine fault is caught with a field-level diff") {
    testsup::TempDir tmp;
    const auto res = run_cli("verify --count 500 --seed 5 --threads 2 --flush-every 500 --out " +
                                 q(tmp.file("work")),
                             "SHARDSTOCK_FAULT_ENGINE=memory_parallel ");
    CHECK(res.exit_code == 1);
    CHECK(res.out.find("verify=mismatch") != std::string::npos);
    CHECK(res.out.find("diff key=") != std::string::npos);
}

TEST_CASE("bench: tiny sweep prints the table and writes CSV and SVG") {
    testsup::TempDir tmp;
    const auto res = run_cli(
        "bench --sizes 100,300 --engines memory_serial,memory_parallel --threads 2 --seed 4 "
        "--out " +
        q(tmp.file("report")));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("engine") != std::string::npos);
    CHECK(res.out.find("memory_serial") != std::string::npos);
    CHECK(res.out.find("milliseconds") != std::string::npos);

    const std::string csv = testsup::read_file(tmp.file("report.csv"));
    CHECK(csv.find("engine,threads,records,millis,status") == 0);
    CHECK(line_count(csv) == 5);  // header + 2 rows x 2 sizes
    const std::string svg = testsup::read_file(tmp.file("report.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("missing subcommand or bad flags exit 2") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("apply --engine memory_serial").exit_code == 2);  // required flags absent
    CHECK(run_cli("frobnicate").exit_code == 2);
}
