#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tpnl/construct.hpp"
#include "tpnl/system_file.hpp"

using namespace tpnl;

namespace {

const std::filesystem::path kFixtures = TPNL_FIXTURE_DIR;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// W4 document with one edit applied to its JSON.
template <class Edit>
std::string edited_w4(Edit edit) {
  Json doc = system_to_json(make_truncated_poly(4));
  edit(doc);
  return doc.dump();
}

std::string load_error(const std::string& text) {
  try {
    parse_system(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("committed fixtures match the generators byte for byte") {
  CHECK(read_file(kFixtures / "W4.json") == format_system(make_truncated_poly(4)));
  CHECK(read_file(kFixtures / "TP22.json") == format_system(make_tensor_trunc(2, 2)));
  CHECK(load_system(kFixtures / "TP22.json") == make_tensor_trunc(2, 2));
}

TEST_CASE("save and load round trip exactly") {
  std::vector<AlgebraSystem> corpus = {make_truncated_poly(2), make_truncated_poly(6), make_tensor_trunc(3, 2),
                                       make_zero_bracket_system(make_truncated_poly(3).product, 3)};
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    corpus.push_back(random_system(3 + static_cast<int>(seed % 3), 2 + static_cast<int>(seed % 2), Rational(1, 2), seed));
    corpus.push_back(random_structured_system(2 + static_cast<int>(seed % 2), seed));
  }
  AlgebraSystem with_fractions = make_tensor_trunc(2, 2);
  with_fractions.brackets["ext"] =
      extend_bracket(with_fractions.product, with_fractions.bracket("b_d1"), with_fractions.derivation("d2"))
          .scaled(Rational(-7, 3));
  corpus.push_back(with_fractions);

  const auto dir = std::filesystem::temp_directory_path() / "tpnl_round_trip";
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    CAPTURE(k);
    const auto path = dir / ("sys_" + std::to_string(k) + ".json");
    save_system(corpus[k], path);
    const AlgebraSystem back = load_system(path);
    CHECK(back == corpus[k]);
    CHECK(format_system(back) == read_file(path));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("rationals are written canonically") {
  AlgebraSystem sys = make_truncated_poly(2);
  sys.derivations["q"] = DerivationMatrix::diagonal({Rational(-2, 4), Rational(6, 3)});
  const std::string text = format_system(sys);
  CHECK(text.find("\"-1/2\"") != std::string::npos);
  CHECK(text.find("\"2\"") != std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("load errors name the offending field") {
  CHECK(load_error(edited_w4([](Json& d) { d["derivations"]["euler"][1][1] = "1/0"; })) ==
        "derivations.euler[1][1]: zero denominator in rational \"1/0\"");
  CHECK(load_error(edited_w4([](Json& d) { d["brackets"]["b1"]["entries"][0]["indices"] = {2, 1}; })) ==
        "brackets.b1.entries[0].indices: indices not strictly increasing");
  CHECK(load_error(edited_w4([](Json& d) { d["dimension"] = 5; })) == "basis: expected 5 entries, found 4");
  CHECK(load_error(edited_w4([](Json& d) { d.erase("product"); })).find("missing field \"product\"") !=
        std::string::npos);
  CHECK(load_error(edited_w4([](Json& d) { d["brackets"]["b1"]["entries"][0]["value"] = {"1", "0"}; })) ==
        "brackets.b1.entries[0].value: expected 4 entries, found 2");
  CHECK(load_error(edited_w4([](Json& d) { d["brackets"]["b1"]["arity"] = 1; })) ==
        "brackets.b1.arity: expected an integer >= 2");
  CHECK(load_error(edited_w4([](Json& d) { d["product"][0][0][0] = 1; })).starts_with("product[0][0][0]"));
  CHECK(load_error("{\"dimension\": 4,").starts_with("parse error: "));
  CHECK_THROWS_AS(load_system(kFixtures / "does_not_exist.json"), InputError);
}

TEST_CASE("report JSON") {
  const AlgebraSystem w4 = make_truncated_poly(4);
  const auto pass = run_suite(w4, "b1", "euler", {IdentityId::NL});
  const Json ok = report_to_json(pass[0]);
  CHECK(ok["identity"] == "NL");
  CHECK(ok["status"] == "pass");
  CHECK(ok["tuples_checked"] == 64);
  CHECK(ok["counterexample"].is_null());
  CHECK(ok["residual"].is_null());
  CHECK_FALSE(ok.contains("elapsed"));

  const auto fail = check_derivation(w4.product, w4.bracket("b1"), formal_derivative(4));
  const Json bad = report_to_json(fail[0]);
  CHECK(bad["status"] == "fail");
  CHECK(bad["counterexample"] == Json::array({1, 3}));
  CHECK(bad["residual"] == Json::array({"0", "0", "0", "-4"}));
  CHECK(bad["tuples_checked"] == 8);

  const std::string text = format_json(reports_to_json(fail));
  CHECK(text.find("\"counterexample\": [1,3]") != std::string::npos);
  CHECK(Json::parse(text) == reports_to_json(fail));
}

TEST_CASE("finding bundle JSON") {
  Finding f;
  f.trial = 12;
  f.trial_seed = 345;
  f.system = make_truncated_poly(3);
  f.premise_reports = run_suite(f.system, "b1", "euler", {IdentityId::ASSOC, IdentityId::NL});
  f.failing_report = check_derivation(f.system.product, f.system.bracket("b1"), formal_derivative(3))[0];
  const Json j = finding_to_json(f);
  CHECK(j["trial"] == 12);
  CHECK(j["trial_seed"] == 345);
  CHECK(system_from_json(j["system"]) == f.system);
  CHECK(j["premise_reports"].size() == 2);
  CHECK(j["failing_report"]["status"] == "fail");
  CHECK(j["failing_report"]["counterexample"] == Json::array({1, 2}));
}
