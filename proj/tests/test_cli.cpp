#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mixlearn/cli.hpp"
#include "mixlearn/density.hpp"
#include "mixlearn/lifter.hpp"
#include "mixlearn/serialize.hpp"

using namespace mixlearn;
namespace fs = std::filesystem;

namespace {

constexpr const char* kStdNormal = R"({"type":"gaussian","mean":[0],"cov":[[1]]})";

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mixlearn_cli_tests" / name;
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

TEST_CASE("argument parsing: subcommand required, help, unknown flags") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"gen", "--no-such-flag", "1"}).code == 2);

    const RunResult help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("mixlearn") != std::string::npos);
    CHECK(help.out.find("gen") != std::string::npos);
    CHECK(help.out.find("formulas") != std::string::npos);
}

TEST_CASE("gen writes the sample and its metadata") {
    const fs::path dir = temp_dir("gen_basic");
    const RunResult r = run({"gen", "--target", kStdNormal, "--n", "5", "--seed", "9", "--out",
                             dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("5 points") != std::string::npos);

    const SampleSet pts = parse_points_text(read_text_file((dir / "sample.txt").string()));
    CHECK(pts.size() == 5);
    CHECK(pts.dim == 1);

    const nlohmann::json meta =
        nlohmann::json::parse(read_text_file((dir / "sample.meta.json").string()));
    CHECK(meta.at("seed").get<std::uint64_t>() == 9);
    CHECK(meta.at("target").dump() == nlohmann::json::parse(kStdNormal).dump());

    // Same invocation, byte-identical artifacts.
    const std::string first = read_text_file((dir / "sample.txt").string());
    const RunResult again = run({"gen", "--target", kStdNormal, "--n", "5", "--seed", "9",
                                 "--out", dir.string()});
    REQUIRE(again.code == 0);
    CHECK(read_text_file((dir / "sample.txt").string()) == first);
}

TEST_CASE("gen handles n = 0, two dimensions, and bad input") {
    const fs::path dir = temp_dir("gen_edges");
    REQUIRE(run({"gen", "--target", kStdNormal, "--n", "0", "--out", dir.string()}).code == 0);
    CHECK(parse_points_text(read_text_file((dir / "sample.txt").string())).size() == 0);

    const fs::path dir2 = temp_dir("gen_2d");
    REQUIRE(run({"gen", "--target",
                 R"({"type":"axis_aligned_gaussian","mean":[0,1],"var":[2,3]})", "--n", "4",
                 "--out", dir2.string()})
                .code == 0);
    const SampleSet pts = parse_points_text(read_text_file((dir2 / "sample.txt").string()));
    CHECK(pts.dim == 2);
    CHECK(pts.size() == 4);

    CHECK(run({"gen", "--target", "not json", "--n", "3"}).code == 2);
    CHECK(run({"gen", "--target", kStdNormal}).code == 2);  // n missing
}

TEST_CASE("learn k = 1 produces the documented artifacts") {
    const fs::path dir = temp_dir("learn_k1");
    const RunResult r = run({"learn", "--target", kStdNormal, "--k", "1", "--eps", "1",
                             "--delta", "0.5", "--s-override", "40", "--seed", "7", "--out",
                             dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("s=40 m=1 M=1 dedup=0 selected_index=0 l1_error=", 0) == 0);
    CHECK(r.err.find("ms") != std::string::npos);  // real timing goes to stderr

    // The written report is byte-stable: runtime_ms pinned to 0.
    CHECK(read_text_file((dir / "report.json").string()) ==
          "{\"s\":40,\"m\":1,\"M\":1,\"dedup\":0,\"runtime_ms\":0,\"selected_index\":0}\n");

    const Density model = deserialize_file((dir / "model.json").string());
    REQUIRE(model.kind() == Density::Kind::mixture);
    REQUIRE(model.components().size() == 1);
    CHECK(model.components()[0].kind() == Density::Kind::gaussian);
    CHECK(std::abs(model.components()[0].mean()[0]) <= 0.6);
}

TEST_CASE("learn k = 2 reports pool bookkeeping in JSON mode") {
    const fs::path dir = temp_dir("learn_k2");
    const RunResult r = run({"learn", "--target", kStdNormal, "--k", "2", "--eps", "1",
                             "--delta", "0.3", "--s-override", "4", "--seed", "3", "--out",
                             dir.string(), "--json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("s").get<std::int64_t>() == 4);
    CHECK(doc.at("M").get<std::int64_t>() + doc.at("dedup").get<std::int64_t>() ==
          candidate_count(4, 2, 1.0));
    CHECK(doc.at("runtime_ms").get<double>() == 0.0);
    CHECK(doc.at("l1_error").get<double>() >= 0.0);
    CHECK(doc.at("l1_error").get<double>() <= 2.0);
    CHECK(doc.at("opt_lower_bound").get<double>() == 0.0);
}

TEST_CASE("learn with contamination reports a positive optimum proxy") {
    const std::string contaminant =
        R"({"type":"histogram1d","left":-8,"right":8,"masses":[0.0625,0.0625,0.0625,0.0625,)"
        R"(0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625]})";
    const fs::path dir = temp_dir("learn_eta");
    const RunResult r = run({"learn", "--target", kStdNormal, "--contaminant", contaminant,
                             "--eta", "0.1", "--k", "2", "--eps", "1", "--delta", "0.3",
                             "--s-override", "6", "--seed", "11", "--out", dir.string(),
                             "--json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("l1_error").get<double>() <= 2.0);
    CHECK(doc.at("opt_lower_bound").get<double>() > 0.0);
    CHECK(doc.at("opt_lower_bound").get<double>() < 0.2);
}

TEST_CASE("learn propagates budget and input failures as exit codes") {
    CHECK(run({"learn", "--target", kStdNormal, "--k", "2", "--eps", "1", "--delta", "0.3",
               "--s-override", "70", "--out", temp_dir("learn_budget").string()})
              .code == 3);
    CHECK(run({"learn", "--target", kStdNormal, "--eps", "1", "--delta", "0.3"}).code == 2);
}

TEST_CASE("exp sweeps write deterministic CSV and median files") {
    const fs::path dir1 = temp_dir("exp_a");
    const std::vector<std::string> base = {"exp",    "--experiment", "mle",
                                           "--target", kStdNormal,    "--sweep",
                                           "[16,32]", "--seeds",      "[1,2]"};

    auto with_out = [&](const fs::path& dir) {
        std::vector<std::string> args = base;
        args.push_back("--out");
        args.push_back(dir.string());
        return args;
    };
    REQUIRE(run(with_out(dir1)).code == 0);

    const std::string csv = read_text_file((dir1 / "results.csv").string());
    const std::vector<std::string> lines = split(csv, '\n');
    REQUIRE(lines.size() >= 5);
    CHECK(lines[0] == "seed,k,d,eps,s,m,M,dedup,l1_error,opt_lower_bound,runtime_ms");
    const std::vector<std::string> row = split(lines[1], ',');
    REQUIRE(row.size() == 11);
    CHECK(row[0] == "1");   // seed
    CHECK(row[1] == "1");   // k
    CHECK(row[2] == "1");   // d
    CHECK(row[4] == "0");   // s unused in the plain-learner sweep
    CHECK(row[5] == "16");  // m is the sweep value
    CHECK(row[6] == "1");   // single-candidate pool
    CHECK(row[7] == "0");   // no dedup
    CHECK(std::stod(row[8]) > 0.0);
    CHECK(row[10] == "0");  // runtime pinned in artifacts

    const std::string dat = read_text_file((dir1 / "medians.dat").string());
    const std::vector<std::string> dat_lines = split(dat, '\n');
    CHECK(dat_lines[0] == "# m median_l1_error");
    CHECK(dat_lines[1].rfind("16 ", 0) == 0);
    CHECK(dat_lines[2].rfind("32 ", 0) == 0);

    const fs::path dir2 = temp_dir("exp_b");
    REQUIRE(run(with_out(dir2)).code == 0);
    CHECK(read_text_file((dir2 / "results.csv").string()) == csv);
}

TEST_CASE("exp mixture mode records the sweep in the s column") {
    const fs::path dir = temp_dir("exp_mix");
    const RunResult r = run({"exp", "--experiment", "mixture", "--target", kStdNormal, "--k",
                             "2", "--eps", "1", "--delta", "0.3", "--sweep", "[3,4]", "--seeds",
                             "[1,2]", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const std::vector<std::string> lines =
        split(read_text_file((dir / "results.csv").string()), '\n');
    const std::vector<std::string> first = split(lines[1], ',');
    const std::vector<std::string> third = split(lines[3], ',');
    CHECK(first[4] == "3");
    CHECK(third[4] == "4");
    CHECK(std::stoll(first[6]) + std::stoll(first[7]) == candidate_count(3, 2, 1.0));
    CHECK(std::stoll(third[6]) + std::stoll(third[7]) == candidate_count(4, 2, 1.0));
    CHECK(split(read_text_file((dir / "medians.dat").string()), '\n')[0] ==
          "# s median_l1_error");
}

TEST_CASE("exp validates the seed list") {
    CHECK(run({"exp", "--experiment", "mle", "--target", kStdNormal, "--sweep", "[16]",
               "--seeds", "[]"})
              .code == 2);
    CHECK(run({"exp", "--experiment", "mle", "--target", kStdNormal, "--sweep", "[16]",
               "--seeds", "[1]"})
              .code == 2);
}

TEST_CASE("config file provides defaults that flags override") {
    const fs::path dir = temp_dir("config_file");
    const fs::path cfg_path = dir / "run.cfg";
    write_text_file(cfg_path.string(),
                    "# sweep experiment\n"
                    "experiment = mle\n"
                    "target = " + std::string(kStdNormal) + "\n"
                    "sweep = [16,32]\n"
                    "seeds = [1,2]\n"
                    "out = " + (dir / "from_config").string() + "\n");
    REQUIRE(run({"exp", "--config", cfg_path.string()}).code == 0);
    CHECK(fs::exists(dir / "from_config" / "results.csv"));

    // The --out flag wins over the config value.
    REQUIRE(run({"exp", "--config", cfg_path.string(), "--out",
                 (dir / "from_flag").string()})
                .code == 0);
    CHECK(fs::exists(dir / "from_flag" / "results.csv"));

    const fs::path bad = dir / "bad.cfg";
    write_text_file(bad.string(), "this line has no equals sign\n");
    const RunResult r = run({"exp", "--config", bad.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(":1:") != std::string::npos);
}

TEST_CASE("formulas reproduces the pinned-constant budget values") {
    // lambda forced to 10 by the coefficient flags.
    const RunResult r = run({"formulas", "--k", "2", "--eps", "0.5", "--delta", "0.3", "--c-dim",
                             "10", "--dim-power", "0", "--c-log", "1e-18", "--json"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("s").get<std::int64_t>() == 192);
    CHECK(std::abs(doc.at("negligible_w").get<double>() - 0.1248) <= 1e-4);
    CHECK(doc.at("M_bound").get<std::string>() == "1.5692754338466701909589473558e+59");
    CHECK(doc.at("m").get<std::int64_t>() == 550);
    CHECK(doc.at("total").get<std::int64_t>() == 742);

    const RunResult table = run({"formulas", "--k", "2", "--eps", "0.5", "--delta", "0.3",
                                 "--c-dim", "10", "--dim-power", "0", "--c-log", "1e-18"});
    REQUIRE(table.code == 0);
    CHECK(table.out.find("s            192") != std::string::npos);
    CHECK(table.out.find("negligible_w 0.1248") != std::string::npos);

    const RunResult sel = run({"formulas", "--k", "1", "--eps", "0.1", "--delta", "0.3", "--M",
                               "100", "--json"});
    REQUIRE(sel.code == 0);
    CHECK(nlohmann::json::parse(sel.out).at("selection_m_at_M").get<std::int64_t>() == 576);

    CHECK(run({"formulas", "--k", "2", "--eps", "0.5"}).code == 2);  // delta missing
}

TEST_CASE("project-check verifies instances end to end") {
    const fs::path dir = temp_dir("project_check");
    const fs::path good = dir / "good.json";
    write_text_file(good.string(),
                    R"({"g":{"type":"histogram1d","left":0,"right":1,"masses":[0.3,0.7]},)"
                    R"("components":[{"type":"histogram1d","left":0,"right":1,"masses":[1,0]},)"
                    R"({"type":"histogram1d","left":0,"right":1,"masses":[0,1]}],)"
                    R"("weights":[0.5,0.5]})");
    const RunResult pass = run({"project-check", good.string()});
    CHECK(pass.code == 0);
    CHECK(pass.out.find("pass") != std::string::npos);

    // --instance and --json paths through the same instance.
    const RunResult json_mode = run({"project-check", "--instance", good.string(), "--json"});
    CHECK(json_mode.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(json_mode.out);
    CHECK(doc.at("pass").get<bool>());
    CHECK(doc.at("identity_residual").get<double>() <= 1e-9);
    CHECK(doc.at("l1_residual").get<double>() <= 1e-6);

    const fs::path singular = dir / "singular.json";
    write_text_file(singular.string(),
                    R"({"g":{"type":"histogram1d","left":0,"right":1,"masses":[0.5,0.5]},)"
                    R"("components":[{"type":"histogram1d","left":0,"right":1,"masses":[1,0]}],)"
                    R"("weights":[1]})");
    const RunResult numeric = run({"project-check", singular.string()});
    CHECK(numeric.code == 4);
    CHECK(numeric.err.find("bin") != std::string::npos);

    const fs::path malformed = dir / "malformed.json";
    write_text_file(malformed.string(), R"({"g":{"type":"histogram1d","left":0,"right":1,)"
                                        R"("masses":[0.5,0.5]},"components":[]})");
    CHECK(run({"project-check", malformed.string()}).code == 2);
    CHECK(run({"project-check", (dir / "missing.json").string()}).code == 2);
    CHECK(run({"project-check"}).code == 2);
}

TEST_CASE("select picks the matching candidate from files") {
    const fs::path dir = temp_dir("select_cmd");
    const fs::path cands = dir / "candidates.json";
    write_text_file(cands.string(),
                    std::string("[") + kStdNormal +
                        R"(,{"type":"gaussian","mean":[10],"cov":[[1]]}])");
    const fs::path sample = dir / "sample.txt";
    write_text_file(sample.string(),
                    points_to_text(draw_sample(deserialize(kStdNormal), 200, 17)));

    const RunResult r = run({"select", "--candidates", cands.string(), "--sample",
                             sample.string(), "--eps", "0.3"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "winner 0\n");

    const RunResult exact = run({"select", "--candidates", cands.string(), "--sample",
                                 sample.string(), "--eps", "0.3", "--oracle", "exact"});
    CHECK(exact.out == "winner 0\n");

    const RunResult mc = run({"select", "--candidates", cands.string(), "--sample",
                              sample.string(), "--eps", "0.3", "--oracle", "monte_carlo",
                              "--mc-points", "5000", "--mc-seed", "3"});
    CHECK(mc.out == "winner 0\n");

    const RunResult json_mode = run({"select", "--candidates", cands.string(), "--sample",
                                     sample.string(), "--eps", "0.3", "--json"});
    const nlohmann::json doc = nlohmann::json::parse(json_mode.out);
    CHECK(doc.at("winner").get<int>() == 0);
    CHECK(doc.at("wins").size() == 2);

    const RunResult emit = run({"select", "--candidates", cands.string(), "--sample",
                                sample.string(), "--eps", "0.3", "--emit-tournament", "--out",
                                dir.string()});
    REQUIRE(emit.code == 0);
    const nlohmann::json tj =
        nlohmann::json::parse(read_text_file((dir / "tournament.json").string()));
    CHECK(tj.at("winner").get<int>() == 0);
}

TEST_CASE("select rejects unusable oracles and inputs") {
    const fs::path dir = temp_dir("select_bad");
    const fs::path cands = dir / "candidates.json";
    write_text_file(cands.string(), std::string("[") + kStdNormal + "]");
    const fs::path mix_cands = dir / "mixture_candidates.json";
    write_text_file(
        mix_cands.string(),
        std::string(R"([{"type":"mixture","weights":[0.5,0.5],"components":[)") + kStdNormal +
            "," + kStdNormal + R"(]},{"type":"gaussian","mean":[1],"cov":[[1]]}])");
    const fs::path sample = dir / "sample.txt";
    write_text_file(sample.string(),
                    points_to_text(draw_sample(deserialize(kStdNormal), 50, 4)));

    CHECK(run({"select", "--candidates", cands.string(), "--sample", sample.string(), "--eps",
               "0.3", "--oracle", "bogus"})
              .code == 2);
    CHECK(run({"select", "--candidates", mix_cands.string(), "--sample", sample.string(),
               "--eps", "0.3", "--oracle", "exact"})
              .code == 2);
    CHECK(run({"select", "--candidates", cands.string(), "--eps", "0.3"}).code == 2);
}
