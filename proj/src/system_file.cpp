#include "tpnl/system_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tpnl {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

Rational rational_at(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a rational string such as \"3\" or \"-1/2\"");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

const Json& array_at(const Json& v, std::size_t len, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  if (v.size() != len) fail(path, "expected " + std::to_string(len) + " entries, found " + std::to_string(v.size()));
  return v;
}

ElementVector vector_at(const Json& v, std::size_t d, const std::string& path) {
  array_at(v, d, path);
  ElementVector out(d);
  for (std::size_t k = 0; k < d; ++k) out[k] = rational_at(v[k], path + "[" + std::to_string(k) + "]");
  return out;
}

Json vector_json(const ElementVector& v) {
  Json arr = Json::array();
  for (const auto& c : v.coords()) arr.push_back(to_string(c));
  return arr;
}

void write_json(std::ostringstream& os, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
    if (v.empty() || flat) {
      os << v.dump();
      return;
    }
    os << "[\n";
    for (std::size_t k = 0; k < v.size(); ++k) {
      os << pad;
      write_json(os, v[k], indent + 2);
      os << (k + 1 < v.size() ? ",\n" : "\n");
    }
    os << close << "]";
  } else if (v.is_object()) {
    if (v.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    std::size_t k = 0;
    for (auto it = v.begin(); it != v.end(); ++it, ++k) {
      os << pad << Json(it.key()).dump() << ": ";
      write_json(os, it.value(), indent + 2);
      os << (k + 1 < v.size() ? ",\n" : "\n");
    }
    os << close << "}";
  } else {
    os << v.dump();
  }
}

}  // namespace

std::string format_json(const Json& doc) {
  std::ostringstream os;
  write_json(os, doc, 0);
  os << "\n";
  return os.str();
}

Json system_to_json(const AlgebraSystem& sys) {
  const std::size_t d = sys.dim;
  Json doc;
  doc["dimension"] = d;
  if (!sys.basis_labels.empty()) doc["basis"] = sys.basis_labels;
  Json product = Json::array();
  for (std::size_t i = 0; i < d; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < d; ++j) {
      Json cell = Json::array();
      for (std::size_t k = 0; k < d; ++k) cell.push_back(to_string(sys.product.coefficient(i, j, k)));
      row.push_back(std::move(cell));
    }
    product.push_back(std::move(row));
  }
  doc["product"] = std::move(product);
  Json brackets = Json::object();
  for (const auto& [name, b] : sys.brackets) {
    Json entries = Json::array();
    for (const auto& [key, value] : b.entries()) {
      Json e;
      e["indices"] = key;
      e["value"] = vector_json(value);
      entries.push_back(std::move(e));
    }
    Json jb;
    jb["arity"] = b.arity();
    jb["entries"] = std::move(entries);
    brackets[name] = std::move(jb);
  }
  doc["brackets"] = std::move(brackets);
  Json derivations = Json::object();
  for (const auto& [name, m] : sys.derivations) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < d; ++k) {
      Json row = Json::array();
      for (std::size_t j = 0; j < d; ++j) row.push_back(to_string(m.entry(k, j)));
      rows.push_back(std::move(row));
    }
    derivations[name] = std::move(rows);
  }
  doc["derivations"] = std::move(derivations);
  return doc;
}

AlgebraSystem system_from_json(const Json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  const Json& jd = field(doc, "dimension", "$");
  if (!jd.is_number_integer() || jd.get<long long>() <= 0) fail("dimension", "expected a positive integer");
  const std::size_t d = jd.get<std::size_t>();

  AlgebraSystem sys;
  sys.dim = d;
  if (auto it = doc.find("basis"); it != doc.end()) {
    array_at(*it, d, "basis");
    for (std::size_t k = 0; k < d; ++k) {
      if (!(*it)[k].is_string()) fail("basis[" + std::to_string(k) + "]", "expected a string");
      sys.basis_labels.push_back((*it)[k].get<std::string>());
    }
  }

  const Json& jp = array_at(field(doc, "product", "$"), d, "product");
  std::vector<Rational> c(d * d * d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::string pi = "product[" + std::to_string(i) + "]";
    array_at(jp[i], d, pi);
    for (std::size_t j = 0; j < d; ++j) {
      const std::string pij = pi + "[" + std::to_string(j) + "]";
      const ElementVector v = vector_at(jp[i][j], d, pij);
      for (std::size_t k = 0; k < d; ++k) c[(i * d + j) * d + k] = v[k];
    }
  }
  sys.product = ProductTensor(d, std::move(c));

  if (auto it = doc.find("brackets"); it != doc.end()) {
    if (!it->is_object()) fail("brackets", "expected an object");
    for (auto b = it->begin(); b != it->end(); ++b) {
      const std::string path = "brackets." + b.key();
      const Json& ja = field(b.value(), "arity", path);
      if (!ja.is_number_integer() || ja.get<long long>() < 2) fail(path + ".arity", "expected an integer >= 2");
      const int arity = ja.get<int>();
      const Json& je = field(b.value(), "entries", path);
      if (!je.is_array()) fail(path + ".entries", "expected an array");
      std::vector<SkewBracket::Entry> entries;
      for (std::size_t e = 0; e < je.size(); ++e) {
        const std::string pe = path + ".entries[" + std::to_string(e) + "]";
        const Json& ji = array_at(field(je[e], "indices", pe), static_cast<std::size_t>(arity), pe + ".indices");
        IndexTuple key;
        for (std::size_t a = 0; a < ji.size(); ++a) {
          if (!ji[a].is_number_integer()) fail(pe + ".indices", "expected integers");
          const long long idx = ji[a].get<long long>();
          if (idx < 0 || static_cast<std::size_t>(idx) >= d) fail(pe + ".indices", "index out of range");
          if (a > 0 && idx <= key.back()) fail(pe + ".indices", "indices not strictly increasing");
          key.push_back(static_cast<int>(idx));
        }
        entries.emplace_back(std::move(key), vector_at(field(je[e], "value", pe), d, pe + ".value"));
      }
      try {
        sys.brackets[b.key()] = SkewBracket(d, arity, std::move(entries));
      } catch (const InputError& e) {
        fail(path, e.what());
      }
    }
  }

  if (auto it = doc.find("derivations"); it != doc.end()) {
    if (!it->is_object()) fail("derivations", "expected an object");
    for (auto m = it->begin(); m != it->end(); ++m) {
      const std::string path = "derivations." + m.key();
      array_at(m.value(), d, path);
      std::vector<Rational> flat(d * d);
      for (std::size_t k = 0; k < d; ++k) {
        const ElementVector row = vector_at(m.value()[k], d, path + "[" + std::to_string(k) + "]");
        for (std::size_t j = 0; j < d; ++j) flat[k * d + j] = row[j];
      }
      sys.derivations[m.key()] = DerivationMatrix(d, std::move(flat));
    }
  }
  sys.validate();
  return sys;
}

std::string format_system(const AlgebraSystem& sys) { return format_json(system_to_json(sys)); }

AlgebraSystem parse_system(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  return system_from_json(doc);
}

void save_system(const AlgebraSystem& sys, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << format_system(sys);
  if (!os) throw InputError("failed writing " + path.string());
}

AlgebraSystem load_system(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  try {
    return parse_system(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Json report_to_json(const CheckReport& r) {
  Json j;
  j["identity"] = std::string(identity_name(r.identity));
  j["status"] = r.passed ? "pass" : "fail";
  j["tuples_checked"] = r.tuples_checked;
  if (r.counterexample) {
    j["counterexample"] = r.counterexample->tuple;
    j["residual"] = vector_json(r.counterexample->residual);
  } else {
    j["counterexample"] = nullptr;
    j["residual"] = nullptr;
  }
  return j;
}

Json reports_to_json(std::span<const CheckReport> reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

Json finding_to_json(const Finding& f) {
  Json j;
  j["trial"] = f.trial;
  j["trial_seed"] = f.trial_seed;
  j["system"] = system_to_json(f.system);
  j["premise_reports"] = reports_to_json(f.premise_reports);
  j["failing_report"] = report_to_json(f.failing_report);
  return j;
}

}  // namespace tpnl
