#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "psys/dsl.hpp"
#include "psys/fssp.hpp"
#include "psys/io.hpp"

using namespace psys;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code;
    std::string output;  // stdout only
};

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "fsspsim_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CommandResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const std::string cmd =
        std::string(FSSPSIM_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = read_file(out);
    return result;
}

std::string data(const char* name) { return std::string(DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("run reproduces the dynamic golden trace") {
    const fs::path trace = work_dir() / "t1.tsv";
    auto r = run_cli("run --system " + data("fig1.top") +
                     " --variant dynamic --commander 3 --squad 1,2,3,4,5 --trace " +
                     trace.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output == "fired at step 7\n");
    CHECK(read_file(trace) == read_file(data("table1_golden.tsv")));
}

TEST_CASE("run reproduces the static golden trace") {
    const fs::path trace = work_dir() / "t2.tsv";
    auto r = run_cli("run --system " + data("fig2.top") +
                     " --variant static --commander 6 --squad 4,5,6,7,9,10 --trace " +
                     trace.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output == "fired at step 25\n");
    CHECK(read_file(trace) == read_file(data("table2_golden.tsv")));
}

TEST_CASE("run usage errors exit with 2") {
    auto r = run_cli("run --system " + data("fig1.top") + " --variant dynamic --squad 1");
    CHECK(r.exit_code == 2);  // missing --commander
    auto r2 = run_cli("run --system " + data("fig1.top") +
                      " --variant dynamic --commander 99 --squad 1");
    CHECK(r2.exit_code == 2);  // commander out of range
    auto r3 = run_cli("run --system " + data("fig1.top") + " --commander 3 --squad 1");
    CHECK(r3.exit_code == 2);  // neither --variant nor --rules
}

TEST_CASE("run exits 3 when the budget cuts the run short") {
    auto r = run_cli("run --system " + data("fig2.top") +
                     " --variant static --commander 6 --squad 4,5,6,7,9,10 --max-steps 3");
    CHECK(r.exit_code == 3);
}

TEST_CASE("min mode is selectable and changes the evolution") {
    const fs::path trace = work_dir() / "t1min.tsv";
    auto r = run_cli("run --system " + data("fig1.top") +
                     " --variant dynamic --commander 3 --squad 1,2,3,4,5 --mode min --trace " +
                     trace.string());
    CHECK(r.exit_code == 0);
    CHECK(read_file(trace) != read_file(data("table1_golden.tsv")));
}

TEST_CASE("oracle prints the published level tables") {
    auto r = run_cli("oracle --system " + data("fig1.top") + " --commander 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output ==
          "node\tlevel\tcount\tpredecessors\tsuccessors\tpeers\n"
          "1\t1\t1\t3\t2\t-\n"
          "2\t2\t1\t1\t-\t-\n"
          "3\t0\t1\t-\t1,4,5,6\t-\n"
          "4\t1\t1\t3\t-\t-\n"
          "5\t1\t1\t3\t-\t-\n"
          "6\t1\t1\t3\t7\t-\n"
          "7\t2\t1\t6\t-\t-\n"
          "# eccentricity: 2\n");

    auto r3 = run_cli("oracle --system " + data("fig3.top") + " --commander 1");
    CHECK(r3.exit_code == 0);
    CHECK(r3.output.find("6\t3\t4\t4,5\t-\t-\n") != std::string::npos);
    CHECK(r3.output.find("4\t2\t2\t3,7\t6\t2\n") != std::string::npos);

    auto bad = run_cli("oracle --system " + data("fig3.top") + " --commander 9");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("verify passes the golden trace and rejects a tampered one") {
    auto good = run_cli("verify --trace " + data("table2_golden.tsv") + " --instance " +
                        data("table2.instance"));
    CHECK(good.exit_code == 0);
    CHECK(good.output.find("result: PASS") != std::string::npos);

    // one cell fires a step early
    std::string tampered = read_file(data("table2_golden.tsv"));
    auto pos = tampered.find("24\ts8 a f");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 9, "24\ts9    ");
    const fs::path bad_path = work_dir() / "tampered.tsv";
    write_file(bad_path, tampered);
    auto bad = run_cli("verify --trace " + bad_path.string() + " --instance " +
                       data("table2.instance"));
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("result: FAIL") != std::string::npos);
    CHECK(bad.output.find("first") != std::string::npos);
}

TEST_CASE("verify rejects a trace that does not belong to the instance") {
    auto r = run_cli("verify --trace " + data("table1_golden.tsv") + " --instance " +
                     data("table2.instance"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("lint prints diagnostics and succeeds") {
    auto r = run_cli("lint " + data("static.rules"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("rule 8.4") != std::string::npos);
    CHECK(r.output.find("rule 8.3") != std::string::npos);
}

TEST_CASE("statechart emits DOT") {
    auto r = run_cli("statechart " + data("static.rules"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("digraph statechart {") != std::string::npos);
    CHECK(r.output.find("\"s6\" -> \"s7\" [label=\"6.1, 6.2\"];") != std::string::npos);

    const fs::path empty = work_dir() / "empty.rules";
    write_file(empty, "");
    auto bad = run_cli("statechart " + empty.string());
    CHECK(bad.exit_code == 2);
}

TEST_CASE("fuzz sweeps cleanly and rejects zero instances") {
    auto r = run_cli("fuzz --seed 1 --n 24 --max-nodes 10 --replay-dir " +
                     (work_dir() / "replay").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("failures: 0") != std::string::npos);

    auto bad = run_cli("fuzz --n 0");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("fuzz detects an injected rule deletion and writes a replay file") {
    RuleProgram broken = static_program()->without_rule("2.1");
    const fs::path rules = work_dir() / "broken.rules";
    write_file(rules, serialize(broken));
    const fs::path replay = work_dir() / "replay_broken";
    auto r = run_cli("fuzz --seed 1 --n 40 --max-nodes 10 --variants static --static-rules " +
                     rules.string() + " --replay-dir " + replay.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("replay: ") != std::string::npos);
    bool wrote = false;
    for (const auto& entry : fs::directory_iterator(replay))
        if (entry.path().extension() == ".instance") wrote = true;
    CHECK(wrote);
}
