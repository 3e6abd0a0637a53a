#pragma once

// Internal helpers shared by the JSON readers and writers.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sgprm/errors.hpp"
#include "sgprm/geometry.hpp"

namespace sgprm::detail {

using nlohmann::json;

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double get_number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline std::string get_string(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> get_vec(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_array() || v.size() != static_cast<std::size_t>(N)) {
    throw ParseError(where + ": field '" + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw ParseError(where + ": field '" + key + "' must contain numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

template <typename Derived>
json to_array(const Eigen::MatrixBase<Derived>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << content;
  if (!out) throw DomainError("write failed for " + path.string());
}

inline void check_format(const json& j, int expected, const std::string& where) {
  if (!j.is_object() || !j.contains("format")) throw ParseError(where + ": missing field 'format'");
  if (!j.at("format").is_number_integer() || j.at("format").get<int>() != expected) {
    throw ParseError(where + ": unsupported format version (expected " + std::to_string(expected) + ")");
  }
}

}  // namespace sgprm::detail
