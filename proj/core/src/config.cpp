#include "sdcs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sdcs {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::size_t lineno = 0;
  for (std::string_view line : split(text, '\n')) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

double parse_number(std::string_view text, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("bad number for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

std::size_t parse_size(std::string_view text, std::string_view key) {
  const double v = parse_number(text, key);
  if (v < 0 || std::floor(v) != v) {
    throw ConfigError("'" + std::string(key) + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError("bad boolean for '" + std::string(key) + "': '" + std::string(text) + "'");
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number(parts[0], "list"));
    } else if (parts.size() == 3) {
      const double start = parse_number(parts[0], "range");
      const double stop = parse_number(parts[1], "range");
      const double step = parse_number(parts[2], "range");
      if (!(step > 0.0) || stop < start) throw ConfigError("bad range '" + std::string(item) + "'");
      const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else {
      throw ConfigError("bad list item '" + std::string(item) + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (double v : parse_number_list(text)) {
    if (v < 0 || std::floor(v) != v) throw ConfigError("list entries must be nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto item : split(text, ',')) {
    if (!item.empty()) out.emplace_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

}  // namespace sdcs
