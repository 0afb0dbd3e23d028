#pragma once

// INI-style run configuration. Values carry explicit unit suffixes ("12 um", "0.035 2aE_R").
// Every key read is recorded with its resolved SI value so a run can be replayed exactly.

#include <bectwist/core_units.hpp>
#include <bectwist/errors.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace bectwist {

enum class Dimension {
  dimensionless,
  length,
  inverse_length,
  mass,
  energy,
  coupling_1d,  // J m
  coupling_2d,  // J m^2
  rotation,     // rad/s
  temperature,
};

inline const char* si_unit(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "";
    case Dimension::length: return "m";
    case Dimension::inverse_length: return "1/m";
    case Dimension::mass: return "kg";
    case Dimension::energy: return "J";
    case Dimension::coupling_1d: return "J*m";
    case Dimension::coupling_2d: return "J*m^2";
    case Dimension::rotation: return "rad/s";
    case Dimension::temperature: return "K";
  }
  return "";
}

/// Scales that some units refer to. Unset scales make the corresponding unit an error.
struct UnitContext {
  std::optional<double> lattice_constant;  // unit "a"
  std::optional<double> recoil_energy;     // units "E_R", "2aE_R"
  std::optional<double> omega_crit;        // unit "Omega_crit"
  std::optional<double> omega_tr;          // unit "omega_tr"
  std::optional<double> oscillator_length; // unit "a0"
};

inline std::string format_number(double v) { return fmt::format("{:.17g}", v); }

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

/// Multiplier converting `unit` to SI for dimension d.
inline std::optional<double> unit_factor(Dimension d, const std::string& unit, const UnitContext& ctx) {
  auto need = [&](const std::optional<double>& v) -> std::optional<double> { return v; };
  switch (d) {
    case Dimension::dimensionless:
      if (unit.empty() || unit == "1") return 1.0;
      break;
    case Dimension::length:
      if (unit == "m") return 1.0;
      if (unit == "cm") return 1e-2;
      if (unit == "mm") return 1e-3;
      if (unit == "um" || unit == "µm") return 1e-6;
      if (unit == "nm") return 1e-9;
      if (unit == "a") return need(ctx.lattice_constant);
      if (unit == "a0") return need(ctx.oscillator_length);
      break;
    case Dimension::inverse_length:
      if (unit == "1/m" || unit == "m^-1") return 1.0;
      if (unit == "1/cm" || unit == "cm^-1") return 1e2;
      if (unit == "1/um" || unit == "um^-1") return 1e6;
      break;
    case Dimension::mass:
      if (unit == "kg") return 1.0;
      if (unit == "amu" || unit == "u") return PhysicalConstants::amu;
      break;
    case Dimension::energy:
      if (unit == "J") return 1.0;
      if (unit == "E_R") return need(ctx.recoil_energy);
      break;
    case Dimension::coupling_1d:
      if (unit == "J*m" || unit == "Jm") return 1.0;
      if (unit == "2aE_R" && ctx.lattice_constant && ctx.recoil_energy)
        return 2.0 * *ctx.lattice_constant * *ctx.recoil_energy;
      break;
    case Dimension::coupling_2d:
      if (unit == "J*m^2" || unit == "Jm^2") return 1.0;
      break;
    case Dimension::rotation:
      if (unit == "rad/s" || unit == "1/s") return 1.0;
      if (unit == "Hz") return 2.0 * std::numbers::pi;
      if (unit == "Omega_crit") return need(ctx.omega_crit);
      if (unit == "omega_tr") return need(ctx.omega_tr);
      break;
    case Dimension::temperature:
      if (unit == "K") return 1.0;
      if (unit == "mK") return 1e-3;
      if (unit == "uK" || unit == "µK") return 1e-6;
      if (unit == "nK") return 1e-9;
      break;
  }
  return std::nullopt;
}

}  // namespace detail

struct GridSpec {
  std::vector<double> values;
};

class Config {
public:
  Config() = default;

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return from_stream(in, path);
  }

  static Config from_string(const std::string& text, const std::string& name = "<string>") {
    std::istringstream in(text);
    return from_stream(in, name);
  }

  const std::string& source() const { return source_; }

  bool has(const std::string& section, const std::string& key) const {
    return tree_.get_child_optional(path(section, key)).has_value();
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto v = tree_.get_optional<std::string>(path(section, key));
    if (!v) return std::nullopt;
    return detail::trim(*v);
  }

  /// Quantity with unit, converted to SI. Missing keys take `fallback` (already SI) if given.
  double quantity(const std::string& section, const std::string& key, Dimension d,
                  const UnitContext& ctx, std::optional<double> fallback = std::nullopt) {
    const auto text = raw(section, key);
    if (!text) {
      if (!fallback) throw error(section, key, "required key is missing");
      record(section, key, *fallback, d);
      return *fallback;
    }
    const auto list = parse_list(section, key, *text, d, ctx);
    if (list.size() != 1) throw error(section, key, "expected a single value");
    record(section, key, list.front(), d);
    return list.front();
  }

  double number(const std::string& section, const std::string& key, std::optional<double> fallback = std::nullopt) {
    return quantity(section, key, Dimension::dimensionless, {}, fallback);
  }

  long long integer(const std::string& section, const std::string& key, std::optional<long long> fallback = std::nullopt) {
    const auto text = raw(section, key);
    long long v = 0;
    if (!text) {
      if (!fallback) throw error(section, key, "required key is missing");
      v = *fallback;
    } else {
      const auto d = detail::parse_double(*text);
      if (!d || !std::isfinite(*d) || std::floor(*d) != *d || std::abs(*d) > 9e15)
        throw error(section, key, "expected an integer, got '" + *text + "'");
      v = static_cast<long long>(*d);
    }
    resolved_[section][key] = std::to_string(v);
    return v;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) {
    const auto text = raw(section, key);
    bool v = fallback;
    if (text) {
      if (*text == "true" || *text == "yes" || *text == "on" || *text == "1") v = true;
      else if (*text == "false" || *text == "no" || *text == "off" || *text == "0") v = false;
      else throw error(section, key, "expected true/false, got '" + *text + "'");
    }
    resolved_[section][key] = v ? "true" : "false";
    return v;
  }

  std::string string(const std::string& section, const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    auto text = raw(section, key);
    if (!text) {
      if (!fallback) throw error(section, key, "required key is missing");
      text = fallback;
    }
    resolved_[section][key] = *text;
    return *text;
  }

  /// Mass given as a number with unit or as a species name from the built-in table.
  double mass(const std::string& section, const std::string& key, std::optional<std::string> fallback_species = std::nullopt) {
    auto text = raw(section, key);
    if (!text) {
      if (!fallback_species) throw error(section, key, "required key is missing");
      text = fallback_species;
    }
    if (auto sp = lookup_species(*text)) {
      resolved_[section][key] = format_number(sp->mass) + " kg";
      return sp->mass;
    }
    const auto list = parse_list(section, key, *text, Dimension::mass, {});
    if (list.size() != 1) throw error(section, key, "expected a single mass or a species name");
    if (!(list.front() > 0.0)) throw error(section, key, "mass must be positive");
    record(section, key, list.front(), Dimension::mass);
    return list.front();
  }

  /// Grid from `<name>_values`, or `<name>_start` / `<name>_stop` / `<name>_points` (inclusive),
  /// or `<name>_start` / `<name>_step` / `<name>_points`. Resolved as an explicit value list.
  GridSpec grid(const std::string& section, const std::string& name, Dimension d, const UnitContext& ctx) {
    GridSpec g;
    const std::string values_key = name + "_values";
    if (auto text = raw(section, values_key)) {
      if (text->empty()) throw error(section, values_key, "sweep grid is empty");
      g.values = parse_list(section, values_key, *text, d, ctx);
    } else if (has(section, name + "_start")) {
      const double start = parse_single(section, name + "_start", d, ctx);
      const long long points = points_of(section, name + "_points");
      if (has(section, name + "_step")) {
        const double step = parse_single(section, name + "_step", d, ctx);
        for (long long k = 0; k < points; ++k) g.values.push_back(start + static_cast<double>(k) * step);
      } else {
        const double stop = parse_single(section, name + "_stop", d, ctx);
        if (points == 1) {
          g.values.push_back(start);
        } else {
          for (long long k = 0; k < points; ++k)
            g.values.push_back(start + (stop - start) * static_cast<double>(k) / static_cast<double>(points - 1));
        }
      }
    } else {
      throw error(section, values_key, "sweep grid is missing (give " + values_key + " or " + name +
                                           "_start/_stop/_points)");
    }
    if (g.values.empty()) throw error(section, values_key, "sweep grid is empty");
    std::string joined;
    for (std::size_t k = 0; k < g.values.size(); ++k) joined += (k ? ", " : "") + format_number(g.values[k]);
    if (*si_unit(d)) joined += std::string(" ") + si_unit(d);
    resolved_[section][values_key] = joined;
    return g;
  }

  /// Optional grid: empty when none of the grid keys is present.
  std::optional<GridSpec> optional_grid(const std::string& section, const std::string& name, Dimension d,
                                        const UnitContext& ctx) {
    if (!has(section, name + "_values") && !has(section, name + "_start")) return std::nullopt;
    return grid(section, name, d, ctx);
  }

  /// Keys actually read, with SI values; defaults are materialised.
  const std::map<std::string, std::map<std::string, std::string>>& resolved() const { return resolved_; }

  std::string resolved_ini() const {
    std::string out;
    for (const auto& [section, keys] : resolved_) {
      out += "[" + section + "]\n";
      for (const auto& [k, v] : keys) out += k + " = " + v + "\n";
      out += "\n";
    }
    return out;
  }

  ValidationError error(const std::string& section, const std::string& key, const std::string& what) const {
    return ValidationError(source_ + ": [" + section + "] " + key, what);
  }

private:
  static Config from_stream(std::istream& in, const std::string& name) {
    Config c;
    c.source_ = name;
    try {
      boost::property_tree::ini_parser::read_ini(in, c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(name + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    return c;
  }

  static boost::property_tree::ptree::path_type path(const std::string& section, const std::string& key) {
    return boost::property_tree::ptree::path_type(section + "\x1f" + key, '\x1f');
  }

  void record(const std::string& section, const std::string& key, double si, Dimension d) {
    std::string s = format_number(si);
    if (*si_unit(d)) s += std::string(" ") + si_unit(d);
    resolved_[section][key] = s;
  }

  double parse_single(const std::string& section, const std::string& key, Dimension d, const UnitContext& ctx) {
    const auto text = raw(section, key);
    if (!text) throw error(section, key, "required key is missing");
    const auto list = parse_list(section, key, *text, d, ctx);
    if (list.size() != 1) throw error(section, key, "expected a single value");
    record(section, key, list.front(), d);
    return list.front();
  }

  long long points_of(const std::string& section, const std::string& key) {
    const long long n = integer(section, key);
    if (n < 1) throw error(section, key, "sweep grid is empty");
    return n;
  }

  /// "v1, v2 ... unit": numbers separated by commas or blanks, one optional trailing unit.
  std::vector<double> parse_list(const std::string& section, const std::string& key, const std::string& text,
                                 Dimension d, const UnitContext& ctx) const {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
      if (ch == ',' || ch == ' ' || ch == '\t') {
        if (!cur.empty()) tokens.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (tokens.empty()) throw error(section, key, "empty value");

    std::string unit;
    if (!detail::parse_double(tokens.back())) {
      unit = tokens.back();
      tokens.pop_back();
    }
    const auto factor = detail::unit_factor(d, unit, ctx);
    if (!factor) {
      const std::string expected = *si_unit(d) ? si_unit(d) : "no unit";
      throw error(section, key, "unknown or unavailable unit '" + unit + "' (SI unit: " + expected + ")");
    }
    std::vector<double> out;
    for (const auto& t : tokens) {
      const auto v = detail::parse_double(t);
      if (!v || !std::isfinite(*v)) throw error(section, key, "not a number: '" + t + "'");
      out.push_back(*v * *factor);
    }
    return out;
  }

  std::string source_;
  boost::property_tree::ptree tree_;
  std::map<std::string, std::map<std::string, std::string>> resolved_;
};

}  // namespace bectwist
