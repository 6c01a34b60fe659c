#include "rose2/config.hpp"

#include "rose2/format.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace rose2 {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

template <typename T>
void parse_value(const std::string& text, T& out, const std::string& key) {
  const char* first = text.data();
  const char* last = first + text.size();
  T value{};
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw InputError("config: bad value for " + key + ": '" + text + "'");
  out = value;
}

template <typename T>
std::string render(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

void assign(Config& config, const std::string& section, const std::string& key, const std::string& value) {
  bool found = false;
  visit_config(config, [&](const char* s, const char* k, auto& field) {
    if (section == s && key == k) {
      parse_value(value, field, section + "." + key);
      found = true;
    }
  });
  if (!found) throw InputError("config: unknown key " + section + "." + key);
}

}  // namespace

Config parse_config(std::string_view text) {
  // The ini parser keeps inline comments in values, so strip them first.
  std::ostringstream cleaned;
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    cleaned << line << '\n';
  }
  boost::property_tree::ptree tree;
  std::istringstream in(cleaned.str());
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  Config config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw InputError("config: key outside a section: " + section);
    for (const auto& [key, value] : body) assign(config, section, key, trim(value.data()));
  }
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(Config& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw InputError("config override must look like section.key=value: " + std::string(assignment));
  }
  assign(config, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
         trim(assignment.substr(eq + 1)));
}

std::string to_toml(const Config& config) {
  Config copy = config;
  std::ostringstream out;
  std::string current;
  visit_config(copy, [&](const char* section, const char* key, auto& field) {
    if (current != section) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << key << " = " << render(field) << '\n';
  });
  return out.str();
}

}  // namespace rose2
