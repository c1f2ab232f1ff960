#include "vtx/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "vtx/errors.hpp"

namespace vtx::units {

namespace {

struct UnitEntry {
  std::string_view symbol;
  Dimension dimension;
  double factor;
};

constexpr std::array kUnits{
    UnitEntry{"m", Dimension::length, 1.0},
    UnitEntry{"cm", Dimension::length, 1e-2},
    UnitEntry{"mm", Dimension::length, 1e-3},
    UnitEntry{"um", Dimension::length, 1e-6},
    UnitEntry{"nm", Dimension::length, 1e-9},
    UnitEntry{"1/m^2", Dimension::area_density, 1.0},
    UnitEntry{"1/um^2", Dimension::area_density, 1e12},
    UnitEntry{"1/nm^2", Dimension::area_density, 1e18},
    UnitEntry{"s", Dimension::time, 1.0},
    UnitEntry{"ms", Dimension::time, 1e-3},
    UnitEntry{"min", Dimension::time, 60.0},
    UnitEntry{"h", Dimension::time, 3600.0},
    UnitEntry{"1/s", Dimension::rate, 1.0},
    UnitEntry{"1/min", Dimension::rate, 1.0 / 60.0},
    UnitEntry{"1/h", Dimension::rate, 1.0 / 3600.0},
    UnitEntry{"m/s", Dimension::velocity, 1.0},
    UnitEntry{"cm/s", Dimension::velocity, 1e-2},
    UnitEntry{"um/s", Dimension::velocity, 1e-6},
    UnitEntry{"nm/s", Dimension::velocity, 1e-9},
    UnitEntry{"m^3", Dimension::volume, 1.0},
    UnitEntry{"L", Dimension::volume, 1e-3},
    UnitEntry{"mL", Dimension::volume, 1e-6},
    UnitEntry{"uL", Dimension::volume, 1e-9},
    UnitEntry{"nL", Dimension::volume, 1e-12},
    UnitEntry{"fL", Dimension::volume, 1e-18},
    UnitEntry{"um^3", Dimension::volume, 1e-18},
    UnitEntry{"nm^3", Dimension::volume, 1e-27},
    UnitEntry{"mol/m^3", Dimension::concentration, 1.0},
    UnitEntry{"mol/L", Dimension::concentration, 1e3},
    UnitEntry{"M", Dimension::concentration, 1e3},
    UnitEntry{"mM", Dimension::concentration, 1.0},
    UnitEntry{"uM", Dimension::concentration, 1e-3},
    UnitEntry{"nM", Dimension::concentration, 1e-6},
    UnitEntry{"1", Dimension::dimensionless, 1.0},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits "<number><ws><unit>" and parses the number.
std::pair<double, std::string_view> split_number(std::string_view text, const std::string& field) {
  text = trim(text);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{}) {
    throw ValidationError(field, "expected '<number> <unit>', got '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ValidationError(field, "non-finite value '" + std::string(text) + "'");
  }
  return {value, trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)))};
}

}  // namespace

std::string_view name(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::area_density: return "area density";
    case Dimension::time: return "time";
    case Dimension::rate: return "rate";
    case Dimension::velocity: return "velocity";
    case Dimension::volume: return "volume";
    case Dimension::concentration: return "concentration";
  }
  return "?";
}

std::string_view si_symbol(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "";
    case Dimension::length: return "m";
    case Dimension::area_density: return "1/m^2";
    case Dimension::time: return "s";
    case Dimension::rate: return "1/s";
    case Dimension::velocity: return "m/s";
    case Dimension::volume: return "m^3";
    case Dimension::concentration: return "mol/m^3";
  }
  return "";
}

double parse(std::string_view text, Dimension expected, const std::string& field) {
  auto [value, unit] = split_number(text, field);
  if (unit.empty()) {
    if (expected == Dimension::dimensionless) return value;
    throw ValidationError(field, "missing unit for " + std::string(name(expected)) + " quantity '" +
                                     std::string(trim(text)) + "'");
  }
  for (const auto& entry : kUnits) {
    if (entry.symbol != unit) continue;
    if (entry.dimension != expected) {
      throw ValidationError(field, "unit '" + std::string(unit) + "' is a " +
                                       std::string(name(entry.dimension)) + ", expected a " +
                                       std::string(name(expected)));
    }
    return value * entry.factor;
  }
  throw ValidationError(field, "unknown unit '" + std::string(unit) + "'");
}

double parse_any(std::string_view text, const std::string& field) {
  auto [value, unit] = split_number(text, field);
  if (unit.empty()) return value;
  for (const auto& entry : kUnits) {
    if (entry.symbol == unit) return value * entry.factor;
  }
  throw ValidationError(field, "unknown unit '" + std::string(unit) + "'");
}

double parse_log_length(std::string_view text, const std::string& field) {
  auto [value, unit] = split_number(text, field);
  if (unit.size() < 5 || unit.substr(0, 3) != "ln(" || unit.back() != ')') {
    throw ValidationError(field, "expected '<number> ln(<length unit>)', got '" +
                                     std::string(trim(text)) + "'");
  }
  const double scale = parse("1 " + std::string(unit.substr(3, unit.size() - 4)), Dimension::length, field);
  return value + std::log(scale);
}

std::string to_text(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string format(double value_si, Dimension d) {
  auto text = to_text(value_si);
  const auto symbol = si_symbol(d);
  if (symbol.empty()) return text;
  return text + " " + std::string(symbol);
}

std::string format_log_length(double ln_meters) { return to_text(ln_meters) + " ln(m)"; }

}  // namespace vtx::units
