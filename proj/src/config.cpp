#include "sdc/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sdc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not 'key = value'");
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + " has no key");
    cfg.entries_.emplace_back(key, value);
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == key; });
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == key) return it->second;
  throw ConfigError("missing config key: " + key);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw ConfigError("bad number for " + key + ": " + v);
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": " + v);
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long KeyValueConfig::get_long(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t used = 0;
    const long l = std::stol(v, &used);
    if (used != v.size()) throw ConfigError("bad integer for " + key + ": " + v);
    return l;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

std::vector<std::string> KeyValueConfig::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(v);
  return out;
}

std::vector<double> KeyValueConfig::parse_numbers(const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string token;
  while (in >> token) {
    try {
      size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size())
        throw ConfigError("bad number in list: " + token);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad number in list: " + token);
    }
  }
  return out;
}

}  // namespace sdc
