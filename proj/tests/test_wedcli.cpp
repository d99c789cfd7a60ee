#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run wedcli(const std::string& args) {
  std::string cmd = std::string(WEDCLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("wedcli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& body) { std::ofstream(p) << body; }

std::string repeat(const std::string& tok, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += tok + " ";
  return out;
}

}  // namespace

TEST_CASE("string distance of abc and bd under unit weights is 2", "[wedcli][published]") {
  Run r = wedcli("string --x " + fixture("abc.txt") + " --y " + fixture("bd.txt") + " --weights " +
                 fixture("unit.tsv") + " --k 2 --oracle");
  CHECK(r.code == 0);
  CHECK(r.out == "distance 2.000000\noracle 2.000000\n");
}

TEST_CASE("string distance of ab and c under the example table is 2", "[wedcli][published]") {
  Run r = wedcli("string --x " + fixture("ab.txt") + " --y " + fixture("c.txt") + " --weights " +
                 fixture("ab_c.tsv") + " --k 3");
  CHECK(r.code == 0);
  CHECK(r.out == "distance 2.000000\n");
}

TEST_CASE("distance above k prints INF and exits 0", "[wedcli]") {
  Run r = wedcli("string --x " + fixture("abc.txt") + " --y " + fixture("bd.txt") + " --weights " +
                 fixture("unit.tsv") + " --k 1");
  CHECK(r.code == 0);
  CHECK(r.out == "distance INF\n");
}

TEST_CASE("character mode splits every non-space character", "[wedcli]") {
  auto dir = scratch_dir();
  write(dir / "x", "kitten\n");
  write(dir / "y", "sitting\n");
  Run r = wedcli("string --chars --x " + (dir / "x").string() + " --y " + (dir / "y").string() + " --weights " +
                 fixture("unit.tsv") + " --k 3 --oracle");
  CHECK(r.code == 0);
  CHECK(r.out == "distance 3.000000\noracle 3.000000\n");
  Run b = wedcli("string --bytes --x " + (dir / "x").string() + " --y " + (dir / "y").string() + " --weights " +
                 fixture("unit.tsv") + " --k 3");
  CHECK(b.out == "distance 3.000000\n");
}

TEST_CASE("tree distance and oracle", "[wedcli]") {
  Run r = wedcli("tree --f " + fixture("f1.tree") + " --g " + fixture("f2.tree") + " --weights " +
                 fixture("unit.tsv") + " --k 2 --oracle");
  CHECK(r.code == 0);
  CHECK(r.out == "distance 1.000000\noracle 1.000000\n");
}

TEST_CASE("dyck distance of a balanced word is 0", "[wedcli][trivial]") {
  Run r = wedcli("dyck --x " + fixture("balanced.dyck") + " --pairs " + fixture("parens.pairs") + " --weights " +
                 fixture("unit.tsv") + " --k 1 --oracle");
  CHECK(r.code == 0);
  CHECK(r.out == "distance 0.000000\noracle 0.000000\n");
  Run n = wedcli("dyck --x " + fixture("near.dyck") + " --pairs " + fixture("parens.pairs") + " --weights " +
                 fixture("unit.tsv") + " --k 2 --oracle");
  CHECK(n.out == "distance 2.000000\noracle 2.000000\n");
}

TEST_CASE("dyck kernel file of the long fixture has 17 symbols and the same distance", "[wedcli][derived]") {
  auto dir = scratch_dir();
  write(dir / "long.dyck", repeat("(", 1000) + "] " + repeat(")", 1000) + "\n");
  std::string base = "dyck --pairs " + fixture("parens.pairs") + " --weights " + fixture("unit.tsv") + " --k 1";
  Run r = wedcli(base + " --x " + (dir / "long.dyck").string() + " --kernel-out " + (dir / "ker").string());
  CHECK(r.code == 0);
  CHECK(r.out == "distance 1.000000\n");
  std::ifstream in(dir / "ker.x");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == repeat("(", 8) + "] " + repeat(")", 7) + ")\n");
  Run again = wedcli(base + " --x " + (dir / "ker.x").string());
  CHECK(again.out == r.out);
}

TEST_CASE("string kernel files re-parse to the same clipped distance", "[wedcli][property]") {
  auto dir = scratch_dir();
  std::string x, y;
  for (int i = 0; i < 200; ++i) x += "a b c ";
  y = x + "d";
  write(dir / "x", x);
  write(dir / "y", y);
  std::string tail = " --weights " + fixture("unit.tsv") + " --k 1";
  Run r = wedcli("string --x " + (dir / "x").string() + " --y " + (dir / "y").string() + tail + " --kernel-out " +
                 (dir / "sk").string());
  CHECK(r.out == "distance 1.000000\n");
  Run again = wedcli("string --x " + (dir / "sk.x").string() + " --y " + (dir / "sk.y").string() + tail);
  CHECK(again.out == r.out);
}

TEST_CASE("batch output follows list order", "[wedcli]") {
  Run r = wedcli("string --batch " + fixture("strings.batch") + " --weights " + fixture("unit.tsv") + " --k 2");
  CHECK(r.code == 0);
  std::string d = std::string(FIXTURE_DIR) + "/";
  CHECK(r.out == d + "abc.txt " + d + "bd.txt\tdistance 2.000000\n" + d + "ab.txt " + d + "c.txt\tdistance 2.000000\n" +
                     d + "abc.txt " + d + "abc.txt\tdistance 0.000000\n");
}

TEST_CASE("validate-weights", "[wedcli][trivial]") {
  Run ok = wedcli("validate-weights --weights " + fixture("ab_c.tsv") + " --mode normalized");
  CHECK(ok.code == 0);
  CHECK(ok.out == "ok\n");
  Run bad = wedcli("validate-weights --weights " + fixture("non_triangle.tsv") + " --mode quasimetric");
  CHECK(bad.code == 2);
  CHECK(bad.out.find("triangle a c b\n") != std::string::npos);
  Run skew = wedcli("validate-weights --weights " + fixture("unit.tsv") + " --pairs " + fixture("parens.pairs") +
                    " --mode skewmetric");
  CHECK(skew.code == 0);
}

TEST_CASE("bad input exits 2", "[wedcli]") {
  CHECK(wedcli("string --x /nonexistent --y " + fixture("bd.txt") + " --weights " + fixture("unit.tsv") + " --k 1").code == 2);
  CHECK(wedcli("string --x " + fixture("abc.txt") + " --y " + fixture("bd.txt") + " --weights " + fixture("unit.tsv") +
               " --k 0").code == 2);
  CHECK(wedcli("tree --f " + fixture("abc.txt") + " --g " + fixture("f2.tree") + " --weights " + fixture("unit.tsv") +
               " --k 1").code == 2);
  CHECK(wedcli("tree --f " + fixture("f1.tree") + " --g " + fixture("f2.tree") + " --weights " +
               fixture("non_triangle.tsv") + " --k 1").code == 2);
  CHECK(wedcli("dyck --x " + fixture("abc.txt") + " --pairs " + fixture("parens.pairs") + " --weights " +
               fixture("unit.tsv") + " --k 1").code == 2);
  CHECK(wedcli("frobnicate").code == 2);
  CHECK(wedcli("string --weights " + fixture("unit.tsv")).code == 2);
}
