#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef BRANCHDIFF_CLI_PATH
#error "BRANCHDIFF_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

const fs::path work = [] {
    auto p = fs::temp_directory_path() / "branchdiff_cli_test";
    fs::create_directories(p);
    return p;
}();

int run(const std::string& args, const std::string& capture = "") {
    std::string cmd = std::string(BRANCHDIFF_CLI_PATH) + " " + args;
    if (!capture.empty())
        cmd += " >" + capture + " 2>/dev/null";
    else
        cmd += " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

long count_lines(const std::string& s) {
    long n = 0;
    for (char c : s)
        n += c == '\n' ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("feller grid emits header plus one row per grid point") {
    const auto out = (work / "feller.csv").string();
    CHECK(run("feller --alpha -0.5 --t 1 --x 0:8:0.01 --out " + out) == 0);
    const std::string csv = slurp(out);
    CHECK(count_lines(csv) == 802);
    CHECK(csv.rfind("x,density,atom,p0", 0) == 0);
}

TEST_CASE("feller qsd law matches the closed form in the CSV") {
    const auto out = (work / "feller_qsd.csv").string();
    CHECK(run("feller --alpha -0.5 --law qsd --x 0:2:1 --out " + out) == 0);
    std::istringstream is(slurp(out));
    std::string line;
    std::getline(is, line); // header
    std::getline(is, line);
    CHECK(line.substr(0, 4) == "0,1,"); // 2|alpha| e^0 = 1
}

TEST_CASE("deterministic output for a fixed config") {
    const auto a = (work / "det_a.csv").string();
    const auto b = (work / "det_b.csv").string();
    const std::string args = "qsd-approx --theta 0.05 --pi 0.75,0.25 --mode line "
                             "--x 0.5:3:0.5 --out ";
    CHECK(run(args + a) == 0);
    CHECK(run(args + b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run("feller --x 5:1:0.1") == 2);            // decreasing grid
    CHECK(run("feller --no-such-flag") == 2);         // unknown option
    CHECK(run("qsd-approx --theta 0.05") == 2);       // model missing
    CHECK(run("moments --alpha 0.5 --theta 0.1 --pi 0.75,0.25") == 2);
    CHECK(run("sample-dist --theta 0.1 --pi 0.75,0.25 --p 1,0,0,1") == 2);
}

TEST_CASE("numerical failures exit with code 1") {
    // supercritical lambda makes the continuum rescaling ill-posed
    CHECK(run("qsd-numeric --lambda 1.05 --m-max 10") == 1);
}

TEST_CASE("moments: dual-method comparison field") {
    const auto out = (work / "moments.json").string();
    CHECK(run("moments --alpha -0.5 --theta 0.1 --pi 0.75,0.25 --method both --out " + out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["max_rel_diff"].get<double>() < 1e-10);
    CHECK(j["mu"][0].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(j["mu2"][0][0].get<double>() == doctest::Approx(1.4375).epsilon(1e-12));
}

TEST_CASE("sample-dist: the n_total = 2 parent-independent table") {
    const auto out = (work / "sample.csv").string();
    const auto summary = (work / "sample_summary.json").string();
    CHECK(run("sample-dist --theta 0.1 --pi 0.75,0.25 --n-total 2 --out " + out,
              summary) == 0);
    std::istringstream is(slurp(out));
    std::string line;
    std::getline(is, line); // header
    double sum = 0.0;
    bool saw_20 = false, saw_02 = false, saw_11 = false;
    while (std::getline(is, line)) {
        int n1 = 0, n2 = 0;
        double prob = 0.0;
        char c;
        std::istringstream row(line);
        row >> n1 >> c >> n2 >> c >> prob;
        sum += prob;
        if (n1 == 2 && n2 == 0)
            saw_20 = std::fabs(prob - 0.73125) < 1e-12;
        if (n1 == 0 && n2 == 2)
            saw_02 = std::fabs(prob - 0.23125) < 1e-12;
        if (n1 == 1 && n2 == 1)
            saw_11 = std::fabs(prob - 0.0375) < 1e-12;
    }
    CHECK(saw_20);
    CHECK(saw_02);
    CHECK(saw_11);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    const auto j = nlohmann::json::parse(slurp(summary));
    CHECK(j["sum"].get<double>() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("mc: critical run reports a KS statistic") {
    const auto out = (work / "mc.json").string();
    CHECK(run("mc --lambda 1.0 --reps 20000 --tau 50 --seed 3 --out " + out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["survived"].get<long>() > 0);
    CHECK(j["ks_exponential"].get<double>() < 0.1);
    CHECK(j["extinct_fraction"].get<double>() > 0.9);
}

TEST_CASE("config file values are read and flags win") {
    const auto cfg = (work / "run.ini").string();
    {
        std::ofstream f(cfg);
        f << "[feller]\nalpha=-0.5\nt=1\nx=0:2:1\n";
    }
    const auto a = (work / "cfg_a.csv").string();
    CHECK(run("--config " + cfg + " feller --out " + a) == 0);
    CHECK(count_lines(slurp(a)) == 4); // header + 3 rows from the config grid
    const auto b = (work / "cfg_b.csv").string();
    CHECK(run("--config " + cfg + " feller --x 0:4:1 --out " + b) == 0);
    CHECK(count_lines(slurp(b)) == 6); // flag overrides the config grid
}
