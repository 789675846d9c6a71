#include "specshift/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace specshift::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '#' || s[i] == ';') return s.substr(0, i);
  return s;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line_no, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(line_no, "empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (section.empty())
      throw ConfigError(line_no, "key '" + key + "' outside any section");
    auto& entries = cfg.sections_[section];
    for (const auto& [k, e] : entries)
      if (k == key)
        throw ConfigError(line_no, "duplicate key '" + key + "' in [" + section + "]");
    entries.push_back({key, Entry{value, line_no, false}});
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return nullptr;
  for (const auto& [k, e] : it->second)
    if (k == key) {
      e.consumed = true;
      return &e;
    }
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return false;
  for (const auto& [k, e] : it->second)
    if (k == key) return true;
  return false;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError(0, "missing required key '" + section + "." + key + "'");
  return e->value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError(0, "missing required key '" + section + "." + key + "'");
  try {
    std::size_t pos = 0;
    const double v = std::stod(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(e->line, "key '" + key + "' is not a number: '" + e->value + "'");
  }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

double Config::get_positive(const std::string& section, const std::string& key,
                            double fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_double(section, key);
  if (!(v > 0))
    throw ConfigError(line_of(section, key),
                      "key '" + key + "' must be positive, got " + std::to_string(v));
  return v;
}

int Config::get_int(const std::string& section, const std::string& key,
                    int fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_double(section, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError(line_of(section, key), "key '" + key + "' must be an integer");
  return i;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError(0, "missing required key '" + section + "." + key + "'");
  std::vector<double> out;
  std::istringstream in(e->value);
  std::string token;
  while (in >> token) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError(e->line, "list entry '" + token + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(e->line, "empty list for key '" + key + "'");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key,
                                            std::vector<double> fallback) const {
  return has(section, key) ? get_double_list(section, key) : std::move(fallback);
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  const auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  for (const auto& [k, e] : it->second) out.push_back(k);
  return out;
}

void Config::set_override(const std::string& section, const std::string& key,
                          const std::string& value) {
  auto& entries = sections_[section];
  for (auto& [k, e] : entries)
    if (k == key) {
      e.value = value;
      e.line = 0;
      return;
    }
  entries.push_back({key, Entry{value, 0, false}});
}

void Config::require_all_consumed() const {
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, e] : entries)
      if (!e.consumed)
        throw ConfigError(e.line, "unknown key '" + key + "' in [" + section + "]");
}

int Config::line_of(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return 0;
  for (const auto& [k, e] : it->second)
    if (k == key) return e.line;
  return 0;
}

std::string Config::canonical_text() const {
  std::ostringstream os;
  for (const auto& [section, entries] : sections_) {
    os << '[' << section << "]\n";
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& [k, e] : entries) kv.emplace_back(k, e.value);
    std::sort(kv.begin(), kv.end());
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  }
  return os.str();
}

}  // namespace specshift::io
