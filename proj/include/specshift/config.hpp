#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace specshift::io {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_number(line) {}
  int line_number;
};

// INI-style sections of key = value lines.  '#' and ';' start comments.
// Access is strict: unknown keys survive the read pass and are rejected by
// require_all_consumed().
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  // validated > 0, error points at the offending line
  double get_positive(const std::string& section, const std::string& key,
                      double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key,
                                      std::vector<double> fallback) const;
  // all keys of one section, in file order (used by the segment list)
  std::vector<std::string> keys(const std::string& section) const;

  // overrides from --set section.key=value (line number 0)
  void set_override(const std::string& section, const std::string& key,
                    const std::string& value);

  void require_all_consumed() const;
  int line_of(const std::string& section, const std::string& key) const;
  std::string canonical_text() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  // section -> ordered (key, entry)
  std::map<std::string, std::vector<std::pair<std::string, Entry>>> sections_;

  const Entry* find(const std::string& section, const std::string& key) const;
};

}  // namespace specshift::io
