#include "qso/spec_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "qso/abscont.hpp"

namespace qso {

using nlohmann::json;

SpecParseError::SpecParseError(std::string path, std::optional<std::size_t> line, std::string pointer,
                               const std::string& message)
    : std::runtime_error(line ? fmt::format("{}:{}: {}", path, *line, message)
                              : fmt::format("{}: {}{}", path, pointer.empty() ? "" : pointer + ": ", message)),
      path_(std::move(path)),
      line_(line),
      pointer_(std::move(pointer)),
      detail_(message) {}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

struct Reader {
  const std::string& path;

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    throw SpecParseError(path, std::nullopt, pointer, msg);
  }

  std::size_t index(const json& j, const std::string& ptr, std::size_t n) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < 1 || static_cast<std::size_t>(v) > n) fail(ptr, fmt::format("index {} outside 1..{}", v, n));
    return static_cast<std::size_t>(v) - 1;
  }

  double real(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
  }

  std::optional<std::string> text(const json& obj, const char* key, const std::string& ptr) const {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_string()) fail(ptr + "/" + key, "expected a string");
    return obj[key].get<std::string>();
  }
};

}  // namespace

OperatorSpec parse_spec(std::string_view text, const std::string& path) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw SpecParseError(path, line_of(text, byte), "", msg);
  }
  const Reader rd{path};
  if (!doc.is_object()) rd.fail("", "top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "n" && key != "coefficients" && key != "va" && key != "metadata") rd.fail("/" + key, "unknown key");
  }
  OperatorSpec spec;
  if (doc.contains("metadata")) {
    const json& md = doc["metadata"];
    if (!md.is_object()) rd.fail("/metadata", "expected an object");
    spec.name = rd.text(md, "name", "/metadata");
    spec.description = rd.text(md, "description", "/metadata");
  }
  const bool has_va = doc.contains("va");
  const bool has_coef = doc.contains("coefficients");
  if (has_va && has_coef) rd.fail("", "'va' and 'coefficients' are mutually exclusive");
  if (!has_va && !has_coef) rd.fail("", "one of 'va' or 'coefficients' is required");

  if (doc.contains("n")) {
    const json& n = doc["n"];
    if (!n.is_number_integer() || n.get<std::int64_t>() < 2) rd.fail("/n", "n must be an integer >= 2");
    spec.n = static_cast<std::size_t>(n.get<std::int64_t>());
  } else if (has_va) {
    spec.n = 2;
  } else {
    rd.fail("/n", "missing");
  }

  if (has_va) {
    const json& va = doc["va"];
    if (!va.is_object() || !va.contains("a")) rd.fail("/va", "expected an object with key 'a'");
    if (spec.n != 2) rd.fail("/n", "the 'va' family lives on n = 2");
    const double a = rd.real(va["a"], "/va/a");
    if (!(a >= 0.0 && a <= 1.0)) rd.fail("/va/a", fmt::format("a = {} outside [0, 1]", a));
    spec.va = a;
    return spec;
  }

  const json& cs = doc["coefficients"];
  if (!cs.is_array()) rd.fail("/coefficients", "expected an array");
  for (std::size_t t = 0; t < cs.size(); ++t) {
    const std::string ptr = fmt::format("/coefficients/{}", t);
    const json& c = cs[t];
    if (!c.is_object()) rd.fail(ptr, "expected an object");
    for (const char* key : {"i", "j", "k", "p"}) {
      if (!c.contains(key)) rd.fail(ptr, fmt::format("missing '{}'", key));
    }
    spec.coefficients.push_back({rd.index(c["i"], ptr + "/i", spec.n), rd.index(c["j"], ptr + "/j", spec.n),
                                 rd.index(c["k"], ptr + "/k", spec.n), rd.real(c["p"], ptr + "/p")});
  }
  return spec;
}

OperatorSpec load_spec(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SpecParseError(file.string(), std::nullopt, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), file.string());
}

std::string serialize_spec(const OperatorSpec& spec) {
  json doc;
  doc["n"] = spec.n;
  if (spec.va) {
    doc["va"] = {{"a", *spec.va}};
  } else {
    std::vector<Coefficient> cs = spec.coefficients;
    for (auto& c : cs) {
      if (c.i > c.j) std::swap(c.i, c.j);
    }
    std::stable_sort(cs.begin(), cs.end(), [](const Coefficient& a, const Coefficient& b) {
      return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    });
    cs.erase(std::unique(cs.begin(), cs.end(),
                         [](const Coefficient& a, const Coefficient& b) {
                           return a.i == b.i && a.j == b.j && a.k == b.k && a.p == b.p;
                         }),
             cs.end());
    json arr = json::array();
    for (const auto& c : cs) arr.push_back({{"i", c.i + 1}, {"j", c.j + 1}, {"k", c.k + 1}, {"p", c.p}});
    doc["coefficients"] = std::move(arr);
  }
  if (spec.name || spec.description) {
    json md = json::object();
    if (spec.name) md["name"] = *spec.name;
    if (spec.description) md["description"] = *spec.description;
    doc["metadata"] = std::move(md);
  }
  return doc.dump(2) + "\n";
}

OperatorSpec spec_from_operator(const QsoOperator& V) {
  OperatorSpec spec;
  spec.n = V.n();
  spec.coefficients = V.tensor().canonical_entries();
  return spec;
}

QsoOperator build_operator(const OperatorSpec& spec, bool symmetrize, double eps_coef) {
  if (spec.va) return va_operator(*spec.va);
  return make_operator(HeredityTensor::from_entries(spec.n, spec.coefficients), symmetrize, eps_coef);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

}  // namespace qso
