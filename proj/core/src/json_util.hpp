#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "sam/domain.hpp"

namespace sam::detail {

/// Parses a JSON document, turning syntax errors into ConfigError with
/// the line and column of the offending byte.
inline nlohmann::json parse_json(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string line_text;
    {
      std::size_t begin = upto;
      while (begin > 0 && text[begin - 1] != '\n') --begin;
      std::size_t end = begin;
      while (end < text.size() && text[end] != '\n') ++end;
      line_text = std::string(text.substr(begin, end - begin));
    }
    throw ConfigError(std::string(what) + ": line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what() + "\n  | " + line_text);
  }
}

/// Reads an optional field, wrapping type errors with the field path.
template <typename T>
T value_or(const nlohmann::json& obj, const char* key, T fallback, std::string_view path) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(path) + "." + key + ": " + e.what());
  }
}

template <typename T>
T required(const nlohmann::json& obj, const char* key, std::string_view path) {
  if (!obj.contains(key)) throw ConfigError(std::string(path) + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(path) + "." + key + ": " + e.what());
  }
}

}  // namespace sam::detail
