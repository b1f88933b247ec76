#include "relmetro/numeric.hpp"

#include "relmetro/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>

namespace relmetro {

namespace {

void reject_unknown_keys(const nlohmann::json& j) {
  static const char* known[] = {"symmetry_tol",       "uncertainty_tol", "exact_identity_tol",
                                "branch_clamp",       "n_max",           "dh_ladder",
                                "plateau_rel",        "validity_threshold"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(fmt::format("unknown numeric policy key '{}'", item.key()));
  }
}

}  // namespace

NumericPolicy NumericPolicy::from_json(const std::string& text, NumericPolicy base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("numeric policy is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("numeric policy must be a JSON object");
  reject_unknown_keys(j);
  try {
    if (j.contains("symmetry_tol")) base.symmetry_tol = j.at("symmetry_tol").get<double>();
    if (j.contains("uncertainty_tol")) base.uncertainty_tol = j.at("uncertainty_tol").get<double>();
    if (j.contains("exact_identity_tol")) base.exact_identity_tol = j.at("exact_identity_tol").get<double>();
    if (j.contains("branch_clamp")) base.branch_clamp = j.at("branch_clamp").get<double>();
    if (j.contains("n_max")) base.n_max = j.at("n_max").get<int>();
    if (j.contains("dh_ladder")) base.dh_ladder = j.at("dh_ladder").get<std::vector<double>>();
    if (j.contains("plateau_rel")) base.plateau_rel = j.at("plateau_rel").get<double>();
    if (j.contains("validity_threshold")) base.validity_threshold = j.at("validity_threshold").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("numeric policy has a field of the wrong type: {}", e.what()));
  }
  if (base.n_max < 2) throw ConfigError("numeric policy n_max must be at least 2");
  if (base.dh_ladder.size() < 3) throw ConfigError("numeric policy dh_ladder needs at least three steps");
  for (std::size_t i = 0; i < base.dh_ladder.size(); ++i) {
    if (!(base.dh_ladder[i] > 0)) throw ConfigError("numeric policy dh_ladder entries must be positive");
    if (i > 0 && !(base.dh_ladder[i] < base.dh_ladder[i - 1]))
      throw ConfigError("numeric policy dh_ladder must be strictly decreasing");
  }
  if (!(base.plateau_rel > 0) || !(base.validity_threshold > 0) || !(base.symmetry_tol > 0) ||
      !(base.uncertainty_tol > 0) || !(base.exact_identity_tol > 0) || !(base.branch_clamp >= 0))
    throw ConfigError("numeric policy tolerances must be positive");
  return base;
}

NumericPolicy NumericPolicy::from_json(const std::string& text) { return from_json(text, NumericPolicy{}); }

std::string NumericPolicy::to_json() const {
  nlohmann::json j = {{"symmetry_tol", symmetry_tol},
                      {"uncertainty_tol", uncertainty_tol},
                      {"exact_identity_tol", exact_identity_tol},
                      {"branch_clamp", branch_clamp},
                      {"n_max", n_max},
                      {"dh_ladder", dh_ladder},
                      {"plateau_rel", plateau_rel},
                      {"validity_threshold", validity_threshold}};
  return j.dump();
}

const NumericPolicy& numeric_policy() {
  static const NumericPolicy policy = [] {
    const char* env = std::getenv(kNumericPolicyEnv);
    if (env == nullptr || *env == '\0') return NumericPolicy{};
    return NumericPolicy::from_json(env);
  }();
  return policy;
}

}  // namespace relmetro
