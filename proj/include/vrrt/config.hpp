#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrrt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One parsed value: a number, a bare/quoted string, or a (possibly nested)
/// array of values.
struct ConfigValue {
  enum class Kind { Number, String, Array };
  Kind kind = Kind::Number;
  double num = 0.0;
  std::string str;
  std::vector<ConfigValue> items;

  bool is_number() const { return kind == Kind::Number; }
  bool is_string() const { return kind == Kind::String; }
  bool is_array() const { return kind == Kind::Array; }

  double as_number() const;
  const std::string& as_string() const;
  std::vector<double> as_number_list() const;
};

/// Flat `key = value` file with `#` comments. Repeated keys are kept in
/// order (get() returns the last occurrence, get_all() every one).
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load_file(const std::string& path);

  bool has(const std::string& key) const;
  const ConfigValue& get(const std::string& key) const;
  std::vector<const ConfigValue*> get_all(const std::string& key) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> number_list(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, ConfigValue>> entries_;
};

}  // namespace vrrt
