#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

using Json = nlohmann::json;

struct RunResult {
    int status = -1;
    std::string out;
};

std::string bin_path() {
    const char* p = std::getenv("QSC_BIN");
    REQUIRE_MESSAGE(p != nullptr, "QSC_BIN must point at the built binary");
    return p;
}

std::string models_dir() {
    const char* p = std::getenv("QSC_MODELS");
    REQUIRE_MESSAGE(p != nullptr, "QSC_MODELS must point at the models directory");
    return p;
}

RunResult run(const std::string& args, const std::string& stderr_file = "/dev/null") {
    std::string cmd = bin_path() + " " + args + " 2>" + stderr_file;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/qsc_cli_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("diagram counting mode prints one compact line") {
    RunResult r = run("diagrams --n 8 --mode count");
    CHECK(r.status == 0);
    CHECK(r.out == "{\"n\":8,\"count\":4140}\n");
}

TEST_CASE("convert runs on the shipped models") {
    RunResult r = run("convert " + models_dir() + "/diffusion.qsc");
    REQUIRE(r.status == 0);
    Json j = Json::parse(r.out);
    CHECK(j["direction"] == "strat-to-ito");
    CHECK(j["validation"]["pass"] == true);
    CHECK(j["roundtrip_residual"].get<double>() < 1e-10);
    // scalar block of the derived generator: -iH - R†R/2 with H, R from the file
    auto scalar_block = j["conversion"]["ito"]["blocks"][0][0];
    double re00 = scalar_block[0][0][0].get<double>();
    CHECK(re00 == doctest::Approx(-0.5).epsilon(1e-9));  // -(R†R/2)_00 = -1/2

    RunResult rev = run("convert --direction ito-to-strat " + models_dir() +
                        "/scattering-chain.qsc");
    CHECK(rev.status == 0);
    Json jr = Json::parse(rev.out);
    CHECK(jr["direction"] == "ito-to-strat");
}

TEST_CASE("check passes on every shipped model") {
    for (const char* name : {"diffusion.qsc", "counting.qsc", "scattering-chain.qsc"}) {
        RunResult r = run("check " + models_dir() + "/" + name);
        CHECK_MESSAGE(r.status == 0, name);
        Json j = Json::parse(r.out);
        CHECK(j["validation"]["pass"] == true);
    }
}

TEST_CASE("check reports numeric defects with exit code one") {
    std::string path = write_temp(
        "bad_gauge.qsc",
        "[model]\nN=2\nd=1\n[E]\nE00=[[0]]\nE01=[[0.5]]\nE02=[[0]]\nE10=[[0.5]]\n"
        "E11=[[0.2]]\nE12=[[0]]\nE20=[[0]]\nE21=[[0]]\nE22=[[0.2]]\n"
        "[gauge]\nZ=[[0,1];[0,0]]\n");
    RunResult r = run("check " + path);
    CHECK(r.status == 1);
    Json j = Json::parse(r.out);
    CHECK(j["validation"]["pass"] == false);
}

TEST_CASE("parse failures exit with code three and a position on stderr") {
    std::string path = write_temp("broken.qsc", "[model]\nN=1\nd=oops\n");
    std::string errfile = "/tmp/qsc_cli_stderr.txt";
    RunResult r = run("check " + path, errfile);
    CHECK(r.status == 3);
    std::string err = slurp(errfile);
    CHECK(err.find("line 3") != std::string::npos);

    RunResult missing = run("check /tmp/qsc_cli_this_file_does_not_exist.qsc");
    CHECK(missing.status == 3);
}

TEST_CASE("flow applies the generator to an observable file") {
    std::string obs = write_temp("obs.mat", "[[1,0];[0,-1]]");
    RunResult r = run("flow " + models_dir() + "/diffusion.qsc --observable " + obs +
                      " --alpha 0 --beta 0");
    REQUIRE(r.status == 0);
    Json j = Json::parse(r.out);
    CHECK(j["alpha"] == 0);
    CHECK(j["beta"] == 0);
    // vacuum action on sigma_z for this model: -i[X,H] - (1/2)[[X,R],R] with
    // H = sigma_z, R = sigma_x: commutator part vanishes, double commutator
    // gives -2 sigma_z
    double v00 = j["value"][0][0][0].get<double>();
    double v11 = j["value"][1][1][0].get<double>();
    CHECK(v00 == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(v11 == doctest::Approx(2.0).epsilon(1e-9));

    RunResult full = run("flow " + models_dir() + "/diffusion.qsc --observable " + obs);
    REQUIRE(full.status == 0);
    Json jf = Json::parse(full.out);
    CHECK(jf["blocks"].size() == 2);
}

TEST_CASE("simulate integrates the reduced propagator of the model") {
    RunResult r = run("simulate " + models_dir() + "/diffusion.qsc");
    REQUIRE(r.status == 0);
    Json j = Json::parse(r.out);
    CHECK(j["t"] == 1.0);
    CHECK(j["propagator"]["steps"].get<int>() >= 128);
    CHECK(j["propagator"]["est_error"].get<double>() < 1e-8);
}

TEST_CASE("sweep writes the expected CSV schema") {
    std::string csv = "/tmp/qsc_cli_sweep.csv";
    std::remove(csv.c_str());
    RunResult r = run("sweep " + models_dir() + "/counting.qsc --csv " + csv);
    REQUIRE(r.status == 0);
    Json j = Json::parse(r.out);
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][0]["ok"] == true);

    std::string text = slurp(csv);
    CHECK(text.rfind("lambda,order,err_abs,err_rel,fit_rate\n", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 3);  // header plus one row per lambda
}

TEST_CASE("reports carry schema and digest metadata") {
    std::string out = "/tmp/qsc_cli_report.json";
    std::remove(out.c_str());
    RunResult r = run("--out " + out + " --seed 7 convert " + models_dir() +
                      "/counting.qsc");
    REQUIRE(r.status == 0);
    Json j = Json::parse(slurp(out));
    CHECK(j["schema_version"] == 1);
    CHECK(j["tool_version"] == "0.1.0");
    CHECK(j["subcommand"] == "convert");
    CHECK(j["seed"] == 7);
    std::string digest = j["input_digest"].get<std::string>();
    CHECK(digest.size() == 16);

    // digest is stable across runs and sensitive to content
    RunResult again = run("--out " + out + " convert " + models_dir() + "/counting.qsc");
    REQUIRE(again.status == 0);
    CHECK(Json::parse(slurp(out))["input_digest"] == digest);
}

TEST_CASE("unknown options fail fast") {
    RunResult r = run("convert --no-such-flag foo");
    CHECK(r.status != 0);
}
