#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdcs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key = value` settings. Lines starting with '#' and blank lines are
// ignored; later assignments override earlier ones.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(std::string_view text);
ConfigMap read_config_file(const std::string& path);

// Lists: "1,2,4" or a range "start:stop:step" (inclusive), or a mix.
std::vector<double> parse_number_list(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);
std::vector<std::string> parse_word_list(std::string_view text);

double parse_number(std::string_view text, std::string_view key);
std::size_t parse_size(std::string_view text, std::string_view key);
bool parse_bool(std::string_view text, std::string_view key);

}  // namespace sdcs
