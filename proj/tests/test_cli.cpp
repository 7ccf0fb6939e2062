#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "tpnl/system_file.hpp"

using namespace tpnl;

namespace {

const std::filesystem::path kFixtures = TPNL_FIXTURE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string operator/(const std::string& file) const { return (path / file).string(); }
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("check exit codes") {
  const Run ok = run({"check", fixture("W4.json"), "--bracket", "b1", "--derivation", "euler"});
  CHECK(ok.code == cli::kOk);
  CHECK(count_lines(ok.out) == 14);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  const Run no_d = run({"check", fixture("W4.json"), "--bracket", "b1"});
  CHECK(no_d.code == cli::kOk);
  CHECK(count_lines(no_d.out) == 10);

  TempDir tmp("tpnl_cli_check");
  AlgebraSystem bad = load_system(fixture("W4.json"));
  std::vector<SkewBracket::Entry> entries = bad.bracket("b1").entries();
  for (auto& [key, value] : entries) {
    if (key == IndexTuple{1, 2}) value = ElementVector::basis(4, 2);
  }
  bad.brackets["b1"] = SkewBracket(4, 2, entries);
  bad.derivations["formal"] = formal_derivative(4);
  save_system(bad, tmp / "bad.json");

  const Run nl = run({"check", tmp / "bad.json", "--bracket", "b1", "--suite", "NL"});
  CHECK(nl.code == cli::kViolation);
  CHECK(nl.out.find("NL       FAIL  at (0,1,2) (tuple 7)  residual [0, 0, 1, 0]") != std::string::npos);

  const Run der = run({"check", tmp / "bad.json", "--bracket", "b1", "--derivation", "formal", "--suite",
                       "DER_MUL", "--format", "json"});
  CHECK(der.code == cli::kViolation);
  const Json doc = Json::parse(der.out);
  REQUIRE(doc.size() == 1);
  CHECK(doc[0]["counterexample"] == Json::array({1, 3}));

  CHECK(run({"check", fixture("W4.json"), "--bracket", "b1", "--suite", "DER_BRK"}).code == cli::kInputError);
  CHECK(run({"check", fixture("W4.json"), "--bracket", "nope"}).code == cli::kInputError);
  CHECK(run({"check", fixture("W4.json"), "--bracket", "b1", "--suite", "NL,XX"}).code == cli::kInputError);
  CHECK(run({"check", fixture("missing.json"), "--bracket", "b1"}).code == cli::kInputError);
  CHECK(run({"check", fixture("W4.json")}).code == cli::kInputError);
  CHECK(run({"check", fixture("W4.json"), "--bracket", "b1", "--format", "xml"}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);
  CHECK(run({}).code == cli::kInputError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("check output is stable across repeats and threads") {
  const std::vector<std::string> base = {"check", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "d2",
                                         "--format", "json"};
  const Run a = run(base);
  const Run b = run(base);
  auto threaded = base;
  threaded.insert(threaded.end(), {"--threads", "4"});
  const Run c = run(threaded);
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("extend") {
  TempDir tmp("tpnl_cli_extend");
  const Run r = run({"extend", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "d2", "-o",
                     tmp / "out.json", "--verify"});
  CHECK(r.code == cli::kOk);
  const AlgebraSystem out = load_system(tmp / "out.json");
  const SkewBracket& m3 = out.bracket("b_d1_ext");
  REQUIRE(m3.entries().size() == 1);
  CHECK(m3.entries()[0].first == IndexTuple{0, 1, 2});
  CHECK(m3.entries()[0].second == ElementVector::basis(4, 3));
  CHECK(out.brackets.size() == 2);

  // the name is taken now
  CHECK(run({"extend", tmp / "out.json", "--bracket", "b_d1", "--derivation", "d2", "-o", tmp / "again.json"}).code ==
        cli::kInputError);

  AlgebraSystem with_zero = load_system(fixture("TP22.json"));
  with_zero.derivations["zero"] = DerivationMatrix::zero(4);
  save_system(with_zero, tmp / "z.json");
  CHECK(run({"extend", tmp / "z.json", "--bracket", "b_d1", "--derivation", "zero", "-o", tmp / "z_out.json"}).code ==
        cli::kOk);
  CHECK(load_system(tmp / "z_out.json").bracket("b_d1_ext").empty());

  CHECK(run({"extend", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "nope", "-o", tmp / "x.json"})
            .code == cli::kInputError);
  CHECK(run({"extend", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "d2"}).code == cli::kInputError);

  // a non-derivation still writes the file; verify reports whatever it finds
  AlgebraSystem w4 = load_system(fixture("W4.json"));
  w4.derivations["formal"] = formal_derivative(4);
  save_system(w4, tmp / "w4f.json");
  const Run v = run({"extend", tmp / "w4f.json", "--bracket", "b1", "--derivation", "formal", "-o", tmp / "w4x.json",
                     "--verify"});
  CHECK(std::filesystem::exists(tmp / "w4x.json"));
  CHECK((v.code == cli::kOk || v.code == cli::kViolation));
  MESSAGE("W4 bracket extended by the formal derivative: verify exit " << v.code);
}

TEST_CASE("tower") {
  TempDir tmp("tpnl_cli_tower");
  const Run r = run({"tower", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "d2", "--steps", "1", "-o",
                     tmp.path.string()});
  CHECK(r.code == cli::kOk);
  const AlgebraSystem level = load_system(tmp / "level_1.json");
  CHECK(level.bracket("b_d1_t1").arity() == 3);
  const Json summary = Json::parse(read_file(tmp / "summary.json"));
  REQUIRE(summary.size() == 1);
  CHECK(summary[0]["nonzero_entries"] == 1);
  CHECK(summary[0]["reports"].size() == 8);
  for (const auto& rep : summary[0]["reports"]) CHECK(rep["status"] == "pass");

  CHECK(run({"tower", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "d2", "d1", "d2", "--steps", "2",
             "-o", tmp.path.string()})
            .code == cli::kInputError);
  CHECK(run({"tower", fixture("TP22.json"), "--bracket", "b_d1", "--derivation", "d2", "--steps", "0"}).code ==
        cli::kInputError);
}

TEST_CASE("gen") {
  const Run tp = run({"gen", "--family", "tensor-trunc", "--a", "2", "--b", "2"});
  CHECK(tp.code == cli::kOk);
  CHECK(tp.out == read_file(kFixtures / "TP22.json"));
  CHECK(run({"gen", "--family", "trunc-poly", "--m", "4"}).out == read_file(kFixtures / "W4.json"));

  for (const char* family : {"random", "structured"}) {
    const std::vector<std::string> args = {"gen", "--family", family, "--dim", "4", "--arity", "3", "--seed", "17"};
    const Run a = run(args);
    CHECK(a.code == cli::kOk);
    CHECK(a.out == run(args).out);
    CHECK(a.out != run({"gen", "--family", family, "--dim", "4", "--arity", "3", "--seed", "18"}).out);
  }
  CHECK(run({"gen", "--family", "zero", "--m", "3", "--arity", "4"}).code == cli::kOk);
  CHECK(run({"gen", "--family", "nope"}).code == cli::kInputError);
  CHECK(run({"gen", "--family", "random", "--density", "2"}).code == cli::kInputError);
  CHECK(run({"gen", "--family", "trunc-poly", "--m", "1"}).code == cli::kInputError);
}

TEST_CASE("hunt") {
  TempDir tmp("tpnl_cli_hunt");
  CHECK(run({"hunt", "--dim", "4", "--arity", "2", "--trials", "10"}).code == cli::kInputError);
  const Run r = run({"hunt", "--dim", "3", "--arity", "3", "--trials", "50", "--seed", "1", "-o", tmp / "f.json"});
  CHECK((r.code == cli::kOk || r.code == cli::kFinding));
  if (r.code == cli::kOk) {
    CHECK(r.out.starts_with("no finding in 50 trials"));
    CHECK_FALSE(std::filesystem::exists(tmp / "f.json"));
  } else {
    CHECK(std::filesystem::exists(tmp / "f.json"));
  }
  CHECK(run({"hunt", "--dim", "3", "--arity", "3"}).code == cli::kInputError);
}
