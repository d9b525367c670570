#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdc/error.hpp"

namespace sdc {

/// Line-oriented "key = value" configuration. '#' starts a comment, keys may
/// repeat (values accumulate in order), whitespace is trimmed.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// All values stored under a repeatable key, in file order.
  std::vector<std::string> get_all(const std::string& key) const;
  /// Whitespace-separated numbers of one value string.
  static std::vector<double> parse_numbers(const std::string& value);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace sdc
