#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dnmap_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(DNMAP_CLI) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" + err.string();
    const int st = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.err = slurp(err);
    return r;
}

std::string example(const std::string& name) { return std::string(DNMAP_EXAMPLES) + "/" + name; }

} // namespace

TEST(Cli, HeatMapWritesCsvAndManifest) {
    const auto dir = scratch("heat");
    const auto r = run("map --problem " + example("heat_dirichlet.json") + " --steps 64 --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(dir / "dn_map.csv");
    std::string header, line, last;
    std::getline(csv, header);
    EXPECT_EQ(header, "t,re_d1q,im_d1q");
    int rows = 0;
    while (std::getline(csv, line)) {
        last = line;
        ++rows;
    }
    EXPECT_EQ(rows, 65);
    double t = 0, re = 0, im = 0;
    ASSERT_EQ(std::sscanf(last.c_str(), "%lf,%lf,%lf", &t, &re, &im), 3);
    EXPECT_DOUBLE_EQ(t, 1.0);
    EXPECT_NEAR(re, -2.0 * std::sqrt(1.0 / 3.141592653589793), 1e-5);
    EXPECT_NEAR(im, 0.0, 1e-12);

    std::ifstream diag(dir / "diagnostics.csv");
    std::getline(diag, header);
    EXPECT_NE(header.find("q0_term,pv_term,residue_term,origin_term"), std::string::npos);

    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(m.at("inputs_sha256").get<std::string>().size(), 64u);
    for (const char* key : {"L", "R_max", "delta0"}) EXPECT_TRUE(m.at("parameters").contains(key)) << key;
    EXPECT_EQ(m.at("grid").at("steps").get<int>(), 64);
}

TEST(Cli, OutputsAreByteIdenticalAcrossJobs) {
    const auto a = scratch("jobs1"), b = scratch("jobs4");
    const std::string base = "map --problem " + example("airy_exp_sum.json") + " --steps 32 --out ";
    ASSERT_EQ(run(base + a.string() + " --jobs 1", a).code, 0);
    ASSERT_EQ(run(base + b.string() + " --jobs 4", b).code, 0);
    for (const char* f : {"dn_map.csv", "diagnostics.csv", "manifest.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, GeneralFlagSelectsGeneralMap) {
    const auto dir = scratch("general");
    const auto r = run("map --general --problem " + example("stokes1_exponential.json") + " --steps 16 --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "manifest.json")).at("mode").get<std::string>(), "general");
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("codes");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{\"dispersion\": [0, 0, 1],";
    EXPECT_EQ(run("map --problem " + bad.string() + " --out " + dir.string(), dir).code, 2);
    EXPECT_EQ(run("map --problem " + example("heat_dirichlet.json") + " --steps 4 --out " + dir.string(), dir).code, 2);
    EXPECT_EQ(run("map --problem " + example("heat_dirichlet.json") + " --bogus", dir).code, 2);

    const auto lead = run("map --problem " + example("stokes1_bad_leading.json") + " --out " + dir.string(), dir);
    EXPECT_EQ(lead.code, 3);
    EXPECT_NE(lead.err.find("ValidationError"), std::string::npos);
    EXPECT_NE(lead.err.find("odd degree"), std::string::npos) << lead.err;

    const auto mode = run("map --mode monomial --problem " + example("stokes1_exponential.json") + " --out " + dir.string(), dir);
    EXPECT_EQ(mode.code, 4);
    EXPECT_NE(mode.err.find("ModeError"), std::string::npos) << mode.err;
}

TEST(Cli, AnalyzeAndVerify) {
    const auto dir = scratch("verify");
    EXPECT_EQ(run("analyze --problem " + example("stokes2_exponential.json") + " --out " + dir.string(), dir).code, 0);
    EXPECT_TRUE(fs::exists(dir / "analysis.txt"));
    const auto v = run("verify --out " + dir.string(), dir);
    EXPECT_EQ(v.code, 0) << v.err;
    EXPECT_TRUE(fs::exists(dir / "verify.txt"));
}
