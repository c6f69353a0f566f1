#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tcsem/cli.hpp"
#include "tcsem/discriminator.hpp"
#include "tcsem/smtgen.hpp"

using namespace tcsem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag)
      : path(std::filesystem::temp_directory_path() / ("tcsem-cli-" + tag + "-" + std::to_string(::rand()))) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("dot prints the truncated sum") {
    const Run r = run({"dot", "--arch", "volta", "--a", "2.0,0,0,0", "--b", "1,0,0,0", "--c", "-0x1p-40f32"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "result f32 0x40000000 +1·2^1\n");
  }

  TEST_CASE("dot pads short vectors and accepts empty ones") {
    CHECK(run({"dot"}).out == "result f32 0x00000000 +0\n");
    CHECK(run({"dot", "--arch", "ampere", "--a", "1,1.5*2^-12", "--b", "1,-1*2^-12"}).out ==
          "result f32 0x3F7FFFFF +1.99999988079071044921875·2^-1\n");
    CHECK(run({"dot", "--arch", "volta", "--a", "1,1.5*2^-12", "--b", "1,-1*2^-12"}).out ==
          "result f32 0x3F800000 +1·2^0\n");
  }

  TEST_CASE("dot records and FP16 output") {
    const Run r = run({"dot", "--format", "records", "--out-precision", "f16", "--a", "1,1*2^-11", "--b", "1,1.5"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("\"result\":\"0x3C01\"") != std::string::npos);
    CHECK(r.out.find("\"exact\":\"+1.000732421875·2^0\"") != std::string::npos);
  }

  TEST_CASE("dot rejects bad input with exit 1") {
    Run r = run({"dot", "--a", "1,1,1,1,1"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("k is 4") != std::string::npos);
    CHECK(run({"dot", "--a", "1.2587890625*2^-15"}).code == kExitUsage);
    CHECK(run({"dot", "--arch", "hopper"}).code == kExitUsage);
    CHECK(run({"dot", "--k", "0"}).code == kExitUsage);
    CHECK(run({"dot", "--guard-bits", "-1"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
  }

  TEST_CASE("search finds a carry witness and reports none for w3:w4") {
    Run r = run({"search", "--property", "carry-bits", "--arch", "volta", "--limit", "1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("witnesses 1") != std::string::npos);
    CHECK(r.out.find("compare w2:w3") != std::string::npos);
    r = run({"search", "--property", "carry-bits", "--compare", "w3:w4", "--trials", "2e5"});
    CHECK(r.code == kExitNoWitness);
    CHECK(r.out.find("none found within budget") != std::string::npos);
  }

  TEST_CASE("search is deterministic and thread independent") {
    const std::vector<std::string> base{"search", "--property", "guard-bits", "--arch", "ampere", "--limit", "3",
                                        "--seed", "9", "--format", "records"};
    auto one = base;
    one.insert(one.end(), {"--threads", "1"});
    auto many = base;
    many.insert(many.end(), {"--threads", "4"});
    const Run a = run(one);
    CHECK(a.code == kExitOk);
    CHECK(a.out == run(many).out);
    CHECK(a.out == run(base).out);
  }

  TEST_CASE("search option validation") {
    CHECK(run({"search"}).code == kExitUsage);
    CHECK(run({"search", "--property", "warp-size"}).code == kExitUsage);
    CHECK(run({"search", "--property", "carry-bits", "--trials", "1.5"}).code == kExitUsage);
    CHECK(run({"search", "--property", "carry-bits", "--exp-range", "3:1"}).code == kExitUsage);
    CHECK(run({"search", "--property", "carry-bits", "--compare", "w3"}).code == kExitUsage);
    CHECK(run({"search", "--property", "carry-bits", "--compare", "w3:w99"}).code == kExitUsage);
    CHECK(run({"search", "--property", "exact-mul", "--exhaustive", "--exp-range", "0:0", "--trials", "1e4"}).code ==
          kExitOk);
  }

  TEST_CASE("check evaluates one assignment") {
    Run r = run({"search", "--property", "final-rounding", "--check", "a=0x3C00,b=0x3C00"});
    CHECK(r.code == kExitNoWitness);  // 1*1 is exact in FP16, so every mode agrees
    r = run({"search", "--property", "exact-mul", "--check", "a=1+2^-10,b=1+2^-10"});
    CHECK(r.code == kExitUsage);  // not a literal
    r = run({"search", "--property", "exact-mul", "--check", "a=0x3C01,b=0x3C01"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("discriminates yes") != std::string::npos);
    CHECK(run({"search", "--property", "exact-mul", "--check", "a=0x3C01"}).code == kExitUsage);
  }

  TEST_CASE("emit-smt writes the same bytes as the library") {
    TempDir dir("emit");
    const std::string path = (dir.path / "p4.smt2").string();
    CHECK(run({"emit-smt", "--property", "normalization", "--arch", "volta", "-o", path}).code == kExitOk);
    const std::string expected =
        emit_property(PropertyId::normalization, ProbeContext::for_arch(ArchPreset::volta), "volta").render();
    CHECK(slurp(path) == expected);
    CHECK(run({"emit-smt", "--property", "normalization", "--arch", "volta"}).out == expected);
    // no temporary files left behind
    CHECK(std::distance(std::filesystem::directory_iterator(dir.path), std::filesystem::directory_iterator()) == 1);
  }

  TEST_CASE("emit-smt --all and labels") {
    TempDir dir("all");
    Run r = run({"emit-smt", "--all", "--out-dir", dir.path.string()});
    CHECK(r.code == kExitOk);
    CHECK(std::distance(std::filesystem::directory_iterator(dir.path), std::filesystem::directory_iterator()) == 27);
    CHECK(std::filesystem::exists(dir.path / "carry_bits_ampere.smt2"));
    r = run({"emit-smt", "--property", "carry-bits", "--carry-bits", "2", "--out-dir", (dir.path / "w2").string()});
    CHECK(r.code == kExitOk);
    CHECK(std::filesystem::exists(dir.path / "w2" / "carry_bits_volta-k4-g0-w2.smt2"));
    CHECK(run({"emit-smt"}).code == kExitUsage);
    CHECK(run({"emit-smt", "--all"}).code == kExitUsage);
    CHECK(run({"emit-smt", "--property", "accum-order", "--k", "2"}).code == kExitUsage);
  }

  TEST_CASE("compare reports and summarizes") {
    Run r = run({"compare", "--a", "1.5,2.25,0.1,3", "--b", "1,1,1,1", "--c", "0.3"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("verdict") != std::string::npos);
    CHECK(r.out.find("instances        1") != std::string::npos);
    r = run({"compare", "--random", "50", "--seed", "2", "--format", "records"});
    CHECK(r.code == kExitOk);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 51);
    CHECK(r.out.find("\"summary\"") != std::string::npos);
    CHECK(run({"compare", "--random", "5", "--a", "1"}).code == kExitUsage);
    CHECK(run({"compare", "--random", "5", "--oracle", "mpfr"}).code == kExitUsage);
  }

  TEST_CASE("mma reads and writes matrix files") {
    TempDir dir("mma");
    std::ofstream(dir.path / "a.csv") << "# f16 2 3\n1,2,3\n4,5,6\n";
    std::ofstream(dir.path / "b.csv") << "# f16 3 2\n1,0\n0,1\n1,1\n";
    const std::string out = (dir.path / "d.csv").string();
    Run r = run({"mma", "--a", (dir.path / "a.csv").string(), "--b", (dir.path / "b.csv").string(), "-o", out});
    CHECK(r.code == kExitOk);
    CHECK(slurp(out) == "# f32 2 2\n0x40800000,0x40A00000\n0x41200000,0x41300000\n");
    CHECK(run({"mma", "--a", (dir.path / "missing.csv").string(), "--b", (dir.path / "b.csv").string()}).code ==
          kExitUsage);
  }

  TEST_CASE("atomic write replaces the target") {
    TempDir dir("atomic");
    const std::string path = (dir.path / "f.txt").string();
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    CHECK(slurp(path) == "two");
    CHECK_THROWS(write_file_atomic((dir.path / "no" / "such" / "f.txt").string(), "x"));
  }
}
