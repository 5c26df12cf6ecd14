#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "fsnull/cli.hpp"
#include "fsnull/reporting.hpp"
#include "fsnull/sampling.hpp"
#include "test_support.hpp"

using namespace fsnull;
using fsnull::testing::read_text;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = execute(args, out, err);
    return {code, out.str(), err.str()};
}

std::set<std::string> listing(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(dir)) names.insert(fs::relative(e.path(), dir).string());
    return names;
}

}  // namespace

TEST_CASE("usage errors exit 2 with usage text") {
    const auto unknown = run({"run-intra", "--data", "x.csv", "--out", "o", "--bogus"});
    CHECK(unknown.code == kExitUsage);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"run-intra", "--out", "o"}).code == kExitUsage);
    CHECK(run({"run-intra", "--data", "x", "--out", "o", "--model", "svm"}).code == kExitUsage);
    CHECK(run({"run-intra", "--data", "x", "--out", "o", "--test-fraction", "0"}).code == kExitUsage);
}

TEST_CASE("help and version exit 0") {
    const auto v = run({"--version"});
    CHECK(v.code == kExitOk);
    CHECK(v.out.find(std::string(kVersion)) != std::string::npos);
    const auto h = run({"--help"});
    CHECK(h.code == kExitOk);
    CHECK(h.out.find("run-intra") != std::string::npos);
}

TEST_CASE("synth is deterministic") {
    const auto dir = fsnull::testing::fresh_dir("cli_synth");
    const std::vector<std::string> base{"synth", "--n", "40", "--p", "30", "--k", "3", "--shift", "0.5", "--seed", "7"};
    auto a = base, b = base, c = base;
    a.insert(a.end(), {"--out", (dir / "a.csv").string()});
    b.insert(b.end(), {"--out", (dir / "b.csv").string()});
    c[10] = "8";
    c.insert(c.end(), {"--out", (dir / "c.csv").string()});
    REQUIRE(run(a).code == kExitOk);
    REQUIRE(run(b).code == kExitOk);
    REQUIRE(run(c).code == kExitOk);
    CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
    CHECK(read_text(dir / "a.csv") != read_text(dir / "c.csv"));
    const auto ds = load_dataset(dir / "a.csv");
    CHECK(ds.n_samples() == 40);
    CHECK(ds.n_features() == 30);
    CHECK(ds.labels.class_counts() == std::vector<std::size_t>{14, 13, 13});
}

TEST_CASE("run-intra writes its bundle inside --out only") {
    const auto dir = fsnull::testing::fresh_dir("cli_intra");
    REQUIRE(run({"synth", "--n", "40", "--p", "25", "--shift", "0.6", "--out", (dir / "d.csv").string()}).code == 0);
    const auto before = listing(dir);
    const auto r = run({"run-intra", "--data", (dir / "d.csv").string(), "--out", (dir / "res").string(), "--runs",
                        "2", "--n-trees", "5", "--threads", "1", "--pca"});
    CHECK(r.code == kExitOk);
    auto after = listing(dir);
    for (const auto& name : before) after.erase(name);
    std::set<std::string> expected;
    for (const char* f : {"runs.csv", "summary.csv", "verdict.txt", "curve.svg", "metadata.txt", "pca.txt", "scatter.svg"}) {
        expected.insert((fs::path("res") / f).string());
    }
    expected.insert("res");
    CHECK(after == expected);
    const auto meta = parse_key_values(read_text(dir / "res" / "metadata.txt"));
    CHECK(std::find(meta.begin(), meta.end(), std::pair<std::string, std::string>{"auc_averaging", "macro-ovr"}) != meta.end());
    CHECK(read_summary_table(dir / "res" / "summary.csv").size() == build_schedule(25).sizes.size());

    // Same tables for another worker count.
    REQUIRE(run({"run-intra", "--data", (dir / "d.csv").string(), "--out", (dir / "res4").string(), "--runs", "2",
                 "--n-trees", "5", "--threads", "4"}).code == 0);
    CHECK(read_text(dir / "res" / "runs.csv") == read_text(dir / "res4" / "runs.csv"));
    CHECK(read_text(dir / "res" / "summary.csv") == read_text(dir / "res4" / "summary.csv"));
}

TEST_CASE("runtime errors exit 1 and name the stage") {
    const auto dir = fsnull::testing::fresh_dir("cli_errors");
    const auto missing = run({"run-intra", "--data", (dir / "nope.csv").string(), "--out", (dir / "o").string()});
    CHECK(missing.code == kExitRuntime);
    CHECK(missing.err.find("stage 'load") != std::string::npos);

    fsnull::testing::write_text(dir / "neg.csv", "a,label\n-1,x\n2,y\n3,x\n4,y\n");
    const auto neg = run({"run-intra", "--data", (dir / "neg.csv").string(), "--out", (dir / "o").string(),
                          "--log-transform"});
    CHECK(neg.code == kExitRuntime);
    CHECK(neg.err.find("log-transform") != std::string::npos);
}

TEST_CASE("run-cross and compare-published") {
    const auto dir = fsnull::testing::fresh_dir("cli_cross");
    REQUIRE(run({"synth", "--n", "30", "--p", "12", "--shift", "0.8", "--seed", "1", "--out", (dir / "a.csv").string()}).code == 0);
    REQUIRE(run({"synth", "--n", "24", "--p", "12", "--shift", "0.8", "--seed", "2", "--out", (dir / "b.csv").string()}).code == 0);
    const auto cross = run({"run-cross", "--train", (dir / "a.csv").string(), "--test", (dir / "b.csv").string(),
                            "--out", (dir / "x").string(), "--runs", "2", "--model", "lr"});
    CHECK(cross.code == kExitOk);
    CHECK(fs::exists(dir / "x" / "verdict.txt"));

    fsnull::testing::write_text(dir / "list.txt", "f1\nf5\n");
    const auto pub = run({"compare-published", "--data", (dir / "a.csv").string(), "--features",
                          (dir / "list.txt").string(), "--out", (dir / "p").string(), "--runs", "2", "--n-trees", "5"});
    CHECK(pub.code == kExitOk);
    const auto kv = parse_key_values(read_text(dir / "p" / "published.txt"));
    CHECK(kv.front() == std::pair<std::string, std::string>{"list_size", "2"});

    fsnull::testing::write_text(dir / "bad.txt", "f1\nnot_a_feature\n");
    const auto bad = run({"compare-published", "--data", (dir / "a.csv").string(), "--features",
                          (dir / "bad.txt").string(), "--out", (dir / "q").string()});
    CHECK(bad.code == kExitRuntime);
    CHECK(bad.err.find("not_a_feature") != std::string::npos);
}

TEST_CASE("the installed binary reports the same exit codes") {
    const std::string exe = FSNULL_CLI_PATH;
    CHECK(WEXITSTATUS(std::system((exe + " --version > /dev/null").c_str())) == 0);
    CHECK(WEXITSTATUS(std::system((exe + " run-intra --bogus 2> /dev/null").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((exe + " run-intra --data /nonexistent.csv --out " +
                                   (fs::temp_directory_path() / "fsnull_test_bin").string() + " 2> /dev/null").c_str())) == 1);
}
