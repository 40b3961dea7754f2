#pragma once

#include "bwb/coding.hpp"
#include "bwb/embed.hpp"
#include "bwb/szlenk.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace bwb {

using Json = nlohmann::ordered_json;

// Reads a JSON document; malformed text raises PreconditionError with the byte offset.
Json parse_json(std::string_view text, const std::string& source = "input");
Json read_json_file(const std::string& path);

// Rationals are written "n" or "n/d"; input also accepts JSON integers, JSON
// decimals (read through their shortest decimal form) and decimal strings.
Rational rational_from_json(const Json& j, const std::string& path = "");
Json to_json(const Rational& q);
VecQ vector_from_json(const Json& j, const std::string& path = "");
Json to_json(const VecQ& v);
MatQ matrix_from_json(const Json& j, const std::string& path = "");
Json to_json(const MatQ& m);
Exponent exponent_from_json(const Json& j, const std::string& path = "");
Json to_json(const Exponent& p);

NormSpec space_from_json(const Json& j, const std::string& path = "");
Json to_json(const NormSpec& spec);
// compact canonical text
std::string canonical(const NormSpec& spec);
bool same_descriptor(const NormSpec& a, const NormSpec& b);

PseudonormCode code_from_json(const Json& j, const std::string& path = "");
Json to_json(const PseudonormCode& code);

TailBudgetSet tail_budget_from_json(const Json& j, const std::string& path = "");
Json to_json(const TailBudgetSet& k);

FiniteMetric metric_from_json(const Json& j, const std::string& path = "");
Json to_json(const FiniteMetric& m);

struct ExtensionData {
  NormSpec nu;
  VecQ zstar;
  Rational eta;
  std::vector<NormSpec> mus;  // spaces to extend to, may be empty
};
ExtensionData extension_from_json(const Json& j, const std::string& path = "");

}  // namespace bwb
