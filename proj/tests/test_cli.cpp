#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>

#include "adder/image.hpp"
#include "adder/stats.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = ADDER_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>/dev/null >/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("adder_cli_test_" + std::to_string(getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cli: dt_ref below 255 on 8-bit input is a config error") {
    TempDir tmp;
    CHECK(run("gen-scene --kind constant --out " + (tmp / "sc") +
              " --width 8 --height 8 --frames 2") == 0);
    CHECK(run("transcode-framed --input " + (tmp / "sc") + " --dtref 100 --out " +
              (tmp / "out.adder")) == 2);
    // and the failed run left no partial output behind
    CHECK_FALSE(fs::exists(tmp / "out.adder"));
    CHECK_FALSE(fs::exists(tmp / "out.adder.tmp"));
}

TEST_CASE("cli: missing input file is an i/o error") {
    TempDir tmp;
    CHECK(run("transcode-framed --input " + (tmp / "nonexistent") + " --out " +
              (tmp / "out.adder")) == 3);
    CHECK(run("stats --in " + (tmp / "nothing.adder")) == 3);
}

TEST_CASE("cli: truncated stream is a format error") {
    TempDir tmp;
    std::ofstream bad(tmp / "bad.adder", std::ios::binary);
    bad << "ADDE";  // header cut short
    bad.close();
    CHECK(run("stats --in " + (tmp / "bad.adder")) == 4);
}

TEST_CASE("cli: full pipeline smoke holds 40 dB at M=0") {
    TempDir tmp;
    REQUIRE(run("gen-scene --kind moving-edge --out " + (tmp / "scene") +
                " --width 32 --height 24 --frames 10 --base 60 --amplitude 120") == 0);
    REQUIRE(run("transcode-framed --input " + (tmp / "scene") + " --m 0 --out " +
                (tmp / "scene.adder")) == 0);
    REQUIRE(run("reconstruct --in " + (tmp / "scene.adder") + " --out " +
                (tmp / "recon")) == 0);

    std::vector<adder::Image8> source, recon;
    for (const auto& p : adder::list_pixmaps(tmp.path / "scene"))
        source.push_back(adder::read_pixmap(p));
    for (const auto& p : adder::list_pixmaps(tmp.path / "recon"))
        recon.push_back(adder::read_pixmap(p));
    REQUIRE(!source.empty());
    REQUIRE(recon.size() >= source.size());
    recon.resize(source.size());
    CHECK(adder::psnr(source, recon) >= 40.0);
}

TEST_CASE("cli: stats and to-dvs run on a transcoded stream") {
    TempDir tmp;
    REQUIRE(run("gen-scene --kind step --out " + (tmp / "scene") +
                " --width 8 --height 8 --frames 6 --base 40 --amplitude 150") == 0);
    REQUIRE(run("transcode-framed --input " + (tmp / "scene") + " --out " +
                (tmp / "s.adder")) == 0);
    CHECK(run("stats --in " + (tmp / "s.adder") + " --json") == 0);
    CHECK(run("to-dvs --in " + (tmp / "s.adder") + " --theta 0.15 --out " +
              (tmp / "s.dvs")) == 0);
    CHECK(fs::exists(tmp / "s.dvs"));
    CHECK(run("play --in " + (tmp / "s.adder") + " --no-delay") == 0);
}

TEST_CASE("cli: sweep emits a csv grid") {
    TempDir tmp;
    REQUIRE(run("gen-scene --kind noise --out " + (tmp / "noise") +
                " --width 16 --height 16 --frames 6 --amplitude 8") == 0);
    REQUIRE(run("sweep --input " + (tmp / "noise") + " --m 0 10 --out " +
                (tmp / "sweep.csv")) == 0);
    std::ifstream csv(tmp / "sweep.csv");
    std::string line;
    int lines = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 3);  // header + 2 rows
}

TEST_CASE("cli: parameters load from a config file") {
    TempDir tmp;
    REQUIRE(run("gen-scene --kind constant --out " + (tmp / "sc") +
                " --width 8 --height 8 --frames 3") == 0);
    std::ofstream cfg(tmp / "run.cfg");
    cfg << "[transcode-framed]\n"
        << "input=\"" << (tmp / "sc") << "\"\n"
        << "out=\"" << (tmp / "cfg.adder") << "\"\n"
        << "m=10\n";
    cfg.close();
    CHECK(run("--config " + (tmp / "run.cfg") + " transcode-framed") == 0);
    CHECK(fs::exists(tmp / "cfg.adder"));
}
