#pragma once

#include <string>
#include <string_view>

namespace vtx::units {

enum class Dimension {
  dimensionless,
  length,
  area_density,  // 1/m^2
  time,
  rate,  // 1/s
  velocity,
  volume,
  concentration,  // mol/m^3
};

std::string_view name(Dimension d);

/// SI symbol used when writing quantities back out.
std::string_view si_symbol(Dimension d);

/// Parses "<number> <unit>" into SI. Throws ValidationError (path = `field`)
/// when the unit is unknown or belongs to another dimension. A bare number is
/// accepted only for dimensionless quantities.
double parse(std::string_view text, Dimension expected, const std::string& field = {});

/// Like parse, but accepts any known unit (or none) and converts to SI.
double parse_any(std::string_view text, const std::string& field = {});

/// Parses "<number> ln(<length unit>)", the log-location of a length
/// distribution, and returns the value shifted to ln(m).
double parse_log_length(std::string_view text, const std::string& field = {});

/// Shortest round-trip decimal text for a double.
std::string to_text(double value);

/// "<shortest SI value> <SI symbol>", the form `parse` reads back exactly.
std::string format(double value_si, Dimension d);
std::string format_log_length(double ln_meters);

namespace literals {
constexpr double nm = 1e-9;
constexpr double nm2 = 1e-18;
}  // namespace literals

}  // namespace vtx::units
