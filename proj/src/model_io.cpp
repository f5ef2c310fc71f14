#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "fman/model.hpp"

namespace fman {

namespace {

// Minimal reader for the TOML-style model format: [section] headers, dotted
// keys, quoted strings, numbers, flat arrays. Line oriented.
struct Value {
  std::variant<std::string, double, std::vector<std::string>, std::vector<double>> v;
  int line = 0;
  bool used = false;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string_array() const { return std::holds_alternative<std::vector<std::string>>(v); }
  bool is_number_array() const { return std::holds_alternative<std::vector<double>>(v); }
};

using KeyMap = std::map<std::string, Value>;

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw Error(Errc::parse, origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

Value parse_scalar(const std::string& tok, const std::string& origin, int line) {
  Value out;
  out.line = line;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    out.v = tok.substr(1, tok.size() - 2);
    return out;
  }
  try {
    std::size_t used = 0;
    double d = std::stod(tok, &used);
    if (used != tok.size()) fail(origin, line, "malformed number '" + tok + "'");
    out.v = d;
    return out;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(origin, line, "expected a quoted string or a number, got '" + tok + "'");
  }
}

std::vector<std::string> split_array_items(const std::string& body, const std::string& origin, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (char ch : body) {
    if (ch == '"') in_string = !in_string;
    if (ch == ',' && !in_string) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (in_string) fail(origin, line, "unterminated string in array");
  std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  return items;
}

KeyMap read_keymap(const std::string& text, const std::string& origin) {
  KeyMap out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(origin, line, "empty section name");
      continue;
    }
    std::size_t eq = std::string::npos;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_string = !in_string;
      if (s[i] == '=' && !in_string) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos) fail(origin, line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(origin, line, "empty key");
    if (val.empty()) fail(origin, line, "empty value");
    std::string full = section.empty() ? key : section + "." + key;

    Value v;
    if (val.front() == '[') {
      if (val.back() != ']') fail(origin, line, "unterminated array");
      auto items = split_array_items(val.substr(1, val.size() - 2), origin, line);
      bool strings = !items.empty() && items.front().size() >= 1 && items.front().front() == '"';
      if (strings) {
        std::vector<std::string> arr;
        for (const auto& it : items) {
          Value sv = parse_scalar(it, origin, line);
          if (!sv.is_string()) fail(origin, line, "mixed array element types");
          arr.push_back(std::get<std::string>(sv.v));
        }
        v.v = std::move(arr);
      } else {
        std::vector<double> arr;
        for (const auto& it : items) {
          Value sv = parse_scalar(it, origin, line);
          if (!sv.is_number()) fail(origin, line, "mixed array element types");
          arr.push_back(std::get<double>(sv.v));
        }
        v.v = std::move(arr);
      }
      v.line = line;
    } else {
      v = parse_scalar(val, origin, line);
    }
    if (out.count(full)) fail(origin, line, "duplicate key '" + full + "'");
    out.emplace(std::move(full), std::move(v));
  }
  return out;
}

Expr parse_model_expr(const std::string& text, const std::string& origin, int line) {
  try {
    return parse_expression(text);
  } catch (const Error& e) {
    fail(origin, line, std::string("in expression \"") + text + "\": " + e.what());
  }
}

// splits "c.2.1.1" -> {"c","2","1","1"}
std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = key.find('.', pos);
    parts.push_back(key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return parts;
}

int parse_index(const std::string& tok, int dim, const std::string& origin, int line) {
  for (char ch : tok)
    if (!std::isdigit(static_cast<unsigned char>(ch))) fail(origin, line, "bad index '" + tok + "'");
  int idx = std::stoi(tok);
  if (idx < 1 || idx > dim)
    fail(origin, line, "index " + tok + " out of range for a " + std::to_string(dim) + "-dimensional model");
  return idx - 1;
}

}  // namespace

FModel parse_model(const std::string& text, const std::string& origin) {
  KeyMap kv = read_keymap(text, origin);
  FModel m;

  auto take = [&](const std::string& key) -> Value* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  };

  Value* namev = take("model.name");
  m.name = namev && namev->is_string() ? std::get<std::string>(namev->v) : origin;

  Value* coordsv = take("model.coords");
  if (!coordsv || !coordsv->is_string_array()) throw Error(Errc::parse, origin + ": missing model.coords array");
  m.coords = std::get<std::vector<std::string>>(coordsv->v);
  const int n = m.dim();

  if (Value* dimv = take("model.dim")) {
    if (!dimv->is_number() || static_cast<int>(std::get<double>(dimv->v)) != n)
      fail(origin, dimv->line, "model.dim does not match the coordinate list length");
  }
  if (Value* basev = take("model.base")) {
    if (!basev->is_number_array()) fail(origin, basev->line, "model.base must be a number array");
    m.base_point = std::get<std::vector<double>>(basev->v);
    if (static_cast<int>(m.base_point.size()) != n) fail(origin, basev->line, "model.base has wrong length");
  } else {
    m.base_point.assign(static_cast<std::size_t>(n), 0.0);
  }

  Value* ev = take("unit.e");
  if (!ev || !ev->is_string_array()) throw Error(Errc::parse, origin + ": missing unit.e array");
  for (const auto& s : std::get<std::vector<std::string>>(ev->v)) m.e.push_back(parse_model_expr(s, origin, ev->line));

  for (auto& [key, val] : kv) {
    if (val.used) continue;
    auto parts = split_key(key);
    if (parts.size() == 5 && parts[0] == "product" && parts[1] == "c") {
      if (!val.is_string()) fail(origin, val.line, "product entries must be expression strings");
      int k = parse_index(parts[2], n, origin, val.line);
      int i = parse_index(parts[3], n, origin, val.line);
      int j = parse_index(parts[4], n, origin, val.line);
      m.set_c(k, i, j, parse_model_expr(std::get<std::string>(val.v), origin, val.line));
      val.used = true;
    } else if (parts.size() == 3 && parts[0] == "field" && parts[2] == "components") {
      if (!val.is_string_array()) fail(origin, val.line, "field components must be a string array");
      std::vector<Expr> comps;
      for (const auto& s : std::get<std::vector<std::string>>(val.v))
        comps.push_back(parse_model_expr(s, origin, val.line));
      if (static_cast<int>(comps.size()) != n) fail(origin, val.line, "field '" + parts[1] + "' has wrong length");
      m.fields[parts[1]] = std::move(comps);
      val.used = true;
    } else if (parts.size() == 4 && parts[0] == "metric" && parts[1] == "g") {
      if (!val.is_string()) fail(origin, val.line, "metric entries must be expression strings");
      if (m.metric.empty()) m.metric.assign(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
      int i = parse_index(parts[2], n, origin, val.line);
      int j = parse_index(parts[3], n, origin, val.line);
      Expr g = parse_model_expr(std::get<std::string>(val.v), origin, val.line);
      m.metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g;
      if (i != j && m.metric[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].empty())
        m.metric[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = g;
      val.used = true;
    } else if (parts.size() == 3 && parts[0] == "density" && parts[2] == "expr") {
      if (!val.is_string()) fail(origin, val.line, "density entries must be expression strings");
      m.densities[parts[1]] = parse_model_expr(std::get<std::string>(val.v), origin, val.line);
      val.used = true;
    } else if (parts.size() == 3 && parts[0] == "data" && parts[2] == "series") {
      if (!val.is_number_array()) fail(origin, val.line, "data series must be a number array");
      m.data_series[parts[1]] = UniSeries(std::get<std::vector<double>>(val.v));
      val.used = true;
    }
  }

  for (const auto& [key, val] : kv)
    if (!val.used) fail(origin, val.line, "unrecognized key '" + key + "'");

  // metric entries never set default to zero
  for (auto& row : m.metric)
    for (auto& g : row)
      if (g.empty()) g = Expr::constant(0.0);

  m.validate();
  return m;
}

FModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

}  // namespace fman
