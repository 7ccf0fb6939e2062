#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tpnl/axioms.hpp"
#include "tpnl/construct.hpp"
#include "tpnl/corpus.hpp"
#include "tpnl/system_file.hpp"

namespace tpnl::cli {

namespace {

std::string tuple_text(const IndexTuple& t) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < t.size(); ++k) os << (k ? "," : "") << t[k];
  os << ")";
  return os.str();
}

std::string vector_text(const ElementVector& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << to_string(v[k]);
  os << "]";
  return os.str();
}

void print_reports(std::span<const CheckReport> reports, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << format_json(reports_to_json(reports));
    return;
  }
  for (const auto& r : reports) {
    out << std::left << std::setw(8) << identity_name(r.identity) << (r.passed ? " pass" : " FAIL");
    if (r.passed) {
      out << "  tuples=" << r.tuples_checked;
    } else {
      out << "  at " << tuple_text(r.counterexample->tuple) << " (tuple " << r.tuples_checked << ")"
          << "  residual " << vector_text(r.counterexample->residual);
    }
    out << "  " << std::fixed << std::setprecision(3) << r.elapsed.count() << "s\n";
  }
}

std::set<IdentityId> parse_suite(const std::string& suite, bool have_derivation) {
  std::set<IdentityId> ids;
  if (suite == "all") {
    for (IdentityId id : kAllIdentities) {
      if (have_derivation || !needs_derivation(id)) ids.insert(id);
    }
    return ids;
  }
  std::stringstream ss(suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) ids.insert(parse_identity(item));
  }
  return ids;
}

struct CommonCheck {
  unsigned threads = 1;
  bool prune = false;
  std::string format = "text";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--threads", threads, "worker threads for tuple enumeration")->check(CLI::PositiveNumber);
    cmd->add_flag("--prune", prune, "restrict skew argument blocks to non-decreasing tuples");
    cmd->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  }
  CheckOptions options() const { return {prune, threads}; }
};

std::set<IdentityId> verify_suite() {
  std::set<IdentityId> ids = structure_suite();
  ids.insert(IdentityId::COMM);
  ids.insert(IdentityId::ASSOC);
  return ids;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  os << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact verification workbench for transposed Poisson n-Lie algebras", "tpnl"};
  app.require_subcommand(1);

  // check
  std::string file, bracket, derivation, suite = "all";
  CommonCheck common;
  auto* check = app.add_subcommand("check", "verify identities on a system file");
  check->add_option("FILE", file)->required();
  check->add_option("--bracket", bracket)->required();
  check->add_option("--derivation", derivation);
  check->add_option("--suite", suite, "comma-separated identity ids, or \"all\"");
  common.add_to(check);

  // extend
  std::string output;
  bool verify = false;
  auto* extend = app.add_subcommand("extend", "add the (n+1)-ary extension of a bracket by a derivation");
  extend->add_option("FILE", file)->required();
  extend->add_option("--bracket", bracket)->required();
  extend->add_option("--derivation", derivation)->required();
  extend->add_option("-o,--output", output)->required();
  extend->add_flag("--verify", verify, "run the structure suite on the extension");
  common.add_to(extend);

  // tower
  std::vector<std::string> tower_derivations;
  int steps = 0;
  bool no_verify = false;
  auto* tower = app.add_subcommand("tower", "iterate the extension, one derivation per step");
  tower->add_option("FILE", file)->required();
  tower->add_option("--bracket", bracket)->required();
  tower->add_option("--derivation", tower_derivations, "derivation per step, in order (one name is reused)")
      ->required()
      ->take_all();
  tower->add_option("--steps", steps)->required()->check(CLI::PositiveNumber);
  tower->add_option("-o,--output", output, "directory receiving level_<k>.json and summary.json");
  tower->add_flag("--no-verify", no_verify);
  common.add_to(tower);

  // gen
  std::string family;
  int m = 4, a = 2, b = 2, dim = 3, arity = 2;
  std::string density = "1/2";
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("gen", "write a generated system file");
  gen->add_option("--family", family)
      ->required()
      ->check(CLI::IsMember({"trunc-poly", "tensor-trunc", "zero", "random", "structured"}));
  gen->add_option("--m", m, "truncation degree (trunc-poly, zero)");
  gen->add_option("--a", a, "s truncation degree (tensor-trunc)");
  gen->add_option("--b", b, "t truncation degree (tensor-trunc)");
  gen->add_option("--dim", dim, "dimension (random)");
  gen->add_option("--arity", arity, "bracket arity (zero, random, structured)");
  gen->add_option("--density", density, "bracket entry density as a rational (random)");
  gen->add_option("--seed", seed);
  gen->add_option("-o,--output", output);

  // hunt
  std::uint64_t trials = 1000;
  unsigned hunt_threads = 1;
  auto* hunt = app.add_subcommand("hunt", "search random systems outside the strong regime");
  hunt->add_option("--dim", dim)->required();
  hunt->add_option("--arity", arity)->required();
  hunt->add_option("--trials", trials)->required();
  hunt->add_option("--seed", seed);
  hunt->add_option("--threads", hunt_threads)->check(CLI::PositiveNumber);
  hunt->add_option("-o,--output", output, "finding bundle path (default finding.json)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (check->parsed()) {
      const AlgebraSystem sys = load_system(file);
      std::optional<std::string> der;
      if (!derivation.empty()) der = derivation;
      const auto reports = run_suite(sys, bracket, der, parse_suite(suite, der.has_value()), common.options());
      print_reports(reports, common.format, out);
      return all_passed(reports) ? kOk : kViolation;
    }

    if (extend->parsed()) {
      AlgebraSystem sys = load_system(file);
      const std::string name = bracket + "_ext";
      if (sys.brackets.contains(name)) throw InputError("bracket \"" + name + "\" already exists");
      SkewBracket ext = extend_bracket(sys.product, sys.bracket(bracket), sys.derivation(derivation));
      sys.brackets[name] = std::move(ext);
      save_system(sys, output);
      if (!verify) return kOk;
      const auto reports = run_suite(sys, name, std::nullopt, verify_suite(), common.options());
      print_reports(reports, common.format, out);
      return all_passed(reports) ? kOk : kViolation;
    }

    if (tower->parsed()) {
      AlgebraSystem sys = load_system(file);
      std::vector<std::string> per_step = tower_derivations;
      if (per_step.size() == 1) per_step.assign(static_cast<std::size_t>(steps), tower_derivations.front());
      if (per_step.size() != static_cast<std::size_t>(steps)) {
        throw InputError("--steps " + std::to_string(steps) + " needs one --derivation or exactly " +
                         std::to_string(steps));
      }
      const auto levels = build_tower(sys, bracket, per_step, !no_verify, common.options());
      const std::filesystem::path dir = output.empty() ? std::filesystem::path(".") : std::filesystem::path(output);
      std::filesystem::create_directories(dir);
      Json summary = Json::array();
      bool ok = true;
      for (const auto& level : levels) {
        sys.brackets[bracket + "_t" + std::to_string(level.step)] = level.bracket;
        save_system(sys, dir / ("level_" + std::to_string(level.step) + ".json"));
        Json entry;
        entry["step"] = level.step;
        entry["derivation"] = level.derivation;
        entry["arity"] = level.bracket.arity();
        entry["nonzero_entries"] = level.bracket.entries().size();
        entry["reports"] = reports_to_json(level.reports);
        summary.push_back(std::move(entry));
        ok = ok && all_passed(level.reports);
        if (common.format == "text") {
          out << "level " << level.step << ": arity " << level.bracket.arity() << ", derivation " << level.derivation
              << ", " << level.bracket.entries().size() << " nonzero entries\n";
          print_reports(level.reports, "text", out);
        }
      }
      const std::string summary_text = format_json(summary);
      write_output((dir / "summary.json").string(), summary_text, out);
      if (common.format == "json") out << summary_text;
      return ok ? kOk : kViolation;
    }

    if (gen->parsed()) {
      AlgebraSystem sys;
      if (family == "trunc-poly") {
        sys = make_truncated_poly(m);
      } else if (family == "tensor-trunc") {
        sys = make_tensor_trunc(a, b);
      } else if (family == "zero") {
        sys = make_zero_bracket_system(make_truncated_poly(m).product, arity);
      } else if (family == "random") {
        sys = random_system(dim, arity, parse_rational(density), seed);
      } else {
        sys = random_structured_system(arity, seed);
      }
      write_output(output, format_system(sys), out);
      return kOk;
    }

    if (hunt->parsed()) {
      const HuntResult result = hunt_counterexample(dim, arity, trials, seed, hunt_threads);
      if (!result.finding) {
        out << "no finding in " << trials << " trials (premises held " << result.stats.premises_held
            << ", strong failed " << result.stats.strong_failed << ")\n";
        return kOk;
      }
      const std::string path = output.empty() ? "finding.json" : output;
      write_output(path, format_json(finding_to_json(*result.finding)), out);
      out << "finding at trial " << result.finding->trial << ": extension fails "
          << identity_name(result.finding->failing_report.identity) << "; bundle written to " << path << "\n";
      return kFinding;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace tpnl::cli
