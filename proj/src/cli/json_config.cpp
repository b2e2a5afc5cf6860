#include "json_config.hpp"

#include <algorithm>
#include <filesystem>

#include "json.hpp"
#include "rppg/common.hpp"
#include "rppg/error.hpp"

namespace rppg::cli {

namespace {

std::string scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool flag_given(const std::vector<std::string>& given, const std::string& flag) {
  return std::any_of(given.begin(), given.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& path, const std::vector<std::string>& given) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::kArgument, "config file not found: " + path);
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kFormat, "config " + path + " is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "config " + path + " must hold a JSON object");

  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || flag_given(given, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_array()) {
      tokens.push_back(flag);
      for (const auto& v : value) tokens.push_back(scalar(v));
    } else if (value.is_object() || value.is_null()) {
      throw Error(ErrorCode::kFormat, "config key '" + key + "' must be a scalar or array");
    } else {
      tokens.push_back(flag);
      tokens.push_back(scalar(value));
    }
  }
  return tokens;
}

}  // namespace rppg::cli
