#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef FORGE_CLI_PATH
#define FORGE_CLI_PATH "forge"
#endif

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd =
      std::string(FORGE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("cli end-to-end pipeline", "[cli]") {
  const fs::path dir = fs::temp_directory_path() / "forge_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();

  SECTION("usage errors exit 2, data errors exit 3") {
    REQUIRE(run("no-such-command") == 2);
    REQUIRE(run("gen") == 2);  // --out is required
    REQUIRE(run("pretrain --corpus " + d + "/missing --out " + d + "/x.forge") == 3);
  }

  SECTION("gen is deterministic and pretrain/embed/cluster run") {
    REQUIRE(run("gen --families vc,is --sizes tiny --count 2 --seed 5 --out " + d +
                "/a") == 0);
    REQUIRE(run("gen --families vc,is --sizes tiny --count 2 --seed 5 --out " + d +
                "/b") == 0);
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
      if (entry.path().filename() == "run_manifest.txt") continue;
      REQUIRE(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
    }

    REQUIRE(run("pretrain --corpus " + d + "/a --d 8 --k 8 --epochs 2 --lr 1e-3 "
                "--seed 3 --out " + d + "/ck.forge") == 0);
    REQUIRE(fs::exists(dir / "ck.forge"));
    REQUIRE(fs::exists(dir / "ck.forge.loss.csv"));
    REQUIRE(fs::exists(dir / "ck.forge.run.txt"));

    REQUIRE(run("embed --corpus " + d + "/a --ckpt " + d + "/ck.forge --out " + d +
                "/emb.csv --binary-out " + d + "/emb.bin") == 0);
    REQUIRE(fs::exists(dir / "emb.csv"));
    REQUIRE(fs::exists(dir / "emb.bin"));

    REQUIRE(run("cluster --corpus " + d + "/a --ckpt " + d + "/ck.forge "
                "--k-clusters 2 --runs 3 --seed 4 --out " + d + "/cl.csv "
                "--projection " + d + "/proj.csv") == 0);
    REQUIRE(fs::exists(dir / "cl.csv"));
    REQUIRE(fs::exists(dir / "proj.csv"));

    REQUIRE(run("report --corpus " + d + "/a --ckpt " + d + "/ck.forge --codebook "
                "--out " + d + "/usage.csv") == 0);
    // gap report without a gap head is a data error
    REQUIRE(run("report --corpus " + d + "/a --ckpt " + d + "/ck.forge --out " + d +
                "/gaps.csv") == 3);
  }

  fs::remove_all(dir);
}
