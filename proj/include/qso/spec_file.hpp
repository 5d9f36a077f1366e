#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qso/operator.hpp"

namespace qso {

inline constexpr const char* kToolVersion = "0.1.0";

/// Parse failure with a location: `line` is 1-based when the failure is
/// syntactic, absent for schema errors (then `pointer` names the field).
class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(std::string path, std::optional<std::size_t> line, std::string pointer, const std::string& message);
  const std::string& path() const { return path_; }
  std::optional<std::size_t> line() const { return line_; }
  const std::string& pointer() const { return pointer_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string path_;
  std::optional<std::size_t> line_;
  std::string pointer_;
  std::string detail_;
};

/// Operator spec file contents. Coefficient indices are 1-based in the file and
/// 0-based here; `va` and `coefficients` are mutually exclusive.
struct OperatorSpec {
  std::size_t n = 0;
  std::vector<Coefficient> coefficients;
  std::optional<double> va;
  std::optional<std::string> name;
  std::optional<std::string> description;
};

OperatorSpec parse_spec(std::string_view text, const std::string& path = "<input>");
OperatorSpec load_spec(const std::filesystem::path& file);

/// JSON text with coefficients in canonical (i <= j) order, floats round-trip exact.
std::string serialize_spec(const OperatorSpec& spec);

/// Sparse spec listing the canonical entries of V.
OperatorSpec spec_from_operator(const QsoOperator& V);

QsoOperator build_operator(const OperatorSpec& spec, bool symmetrize = false, double eps_coef = 1e-12);

std::string sha256_hex(std::string_view bytes);

}  // namespace qso
