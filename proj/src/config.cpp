#include "vrrt/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace vrrt {

double ConfigValue::as_number() const {
  if (kind != Kind::Number) throw ConfigError("expected a number");
  return num;
}

const std::string& ConfigValue::as_string() const {
  if (kind != Kind::String) throw ConfigError("expected a string");
  return str;
}

std::vector<double> ConfigValue::as_number_list() const {
  if (kind != Kind::Array) throw ConfigError("expected an array");
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& v : items) out.push_back(v.as_number());
  return out;
}

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  int line = 1;

  bool eof() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  void advance() {
    if (s[i] == '\n') ++line;
    ++i;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "config parse error at line " << line << ": " << msg;
    throw ConfigError(os.str());
  }
};

bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '-' || c == '+' || c == '/';
}

ConfigValue parse_scalar(const std::string& tok, Cursor& cur) {
  if (tok.empty()) cur.fail("empty value");
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  ConfigValue out;
  if (ec == std::errc() && p == tok.data() + tok.size()) {
    out.kind = ConfigValue::Kind::Number;
    out.num = v;
  } else {
    out.kind = ConfigValue::Kind::String;
    out.str = tok;
  }
  return out;
}

ConfigValue parse_value(Cursor& cur);

bool peek_is_space(const Cursor& cur) {
  char c = cur.s[cur.i];
  return c == ' ' || c == '\t';
}

ConfigValue parse_array(Cursor& cur) {
  ConfigValue out;
  out.kind = ConfigValue::Kind::Array;
  cur.advance();  // consume '['
  while (true) {
    // arrays may span lines
    while (!cur.eof() && (peek_is_space(cur) || cur.peek() == '\n' || cur.peek() == '\r'))
      cur.advance();
    if (cur.eof()) cur.fail("unterminated array");
    if (cur.peek() == '#') {
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
      continue;
    }
    if (cur.peek() == ']') {
      cur.advance();
      return out;
    }
    if (cur.peek() == ',') {
      cur.advance();
      continue;
    }
    out.items.push_back(parse_value(cur));
  }
}

ConfigValue parse_value(Cursor& cur) {
  if (cur.peek() == '[') return parse_array(cur);
  if (cur.peek() == '"') {
    cur.advance();
    std::string tok;
    while (!cur.eof() && cur.peek() != '"' && cur.peek() != '\n') {
      tok += cur.peek();
      cur.advance();
    }
    if (cur.eof() || cur.peek() != '"') cur.fail("unterminated string");
    cur.advance();
    ConfigValue out;
    out.kind = ConfigValue::Kind::String;
    out.str = tok;
    return out;
  }
  std::string tok;
  while (!cur.eof() && is_bare_char(cur.peek())) {
    tok += cur.peek();
    cur.advance();
  }
  return parse_scalar(tok, cur);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  Cursor cur{text};
  while (!cur.eof()) {
    cur.skip_ws_inline();
    if (cur.eof()) break;
    char c = cur.peek();
    if (c == '\n' || c == '\r') {
      cur.advance();
      continue;
    }
    if (c == '#') {
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
      continue;
    }
    std::string key;
    while (!cur.eof() && is_bare_char(cur.peek())) {
      key += cur.peek();
      cur.advance();
    }
    if (key.empty()) cur.fail("expected a key");
    cur.skip_ws_inline();
    if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
    cur.advance();
    cur.skip_ws_inline();
    if (cur.eof() || cur.peek() == '\n' || cur.peek() == '#')
      cur.fail("missing value for key '" + key + "'");
    ConfigValue v = parse_value(cur);
    cur.skip_ws_inline();
    if (!cur.eof() && cur.peek() != '\n' && cur.peek() != '\r' && cur.peek() != '#')
      cur.fail("trailing characters after value for key '" + key + "'");
    cfg.entries_.emplace_back(std::move(key), std::move(v));
  }
  return cfg;
}

Config Config::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str());
}

bool Config::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

const ConfigValue& Config::get(const std::string& key) const {
  const ConfigValue* found = nullptr;
  for (const auto& [k, v] : entries_)
    if (k == key) found = &v;
  if (!found) throw ConfigError("missing config key: " + key);
  return *found;
}

std::vector<const ConfigValue*> Config::get_all(const std::string& key) const {
  std::vector<const ConfigValue*> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(&v);
  return out;
}

double Config::number(const std::string& key) const { return get(key).as_number(); }

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? get(key).as_number() : fallback;
}

std::string Config::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key).as_string() : fallback;
}

std::vector<double> Config::number_list(const std::string& key) const {
  return get(key).as_number_list();
}

}  // namespace vrrt
