#pragma once

namespace vtx {

/// Principal branch W0 of the Lambert W function on [-1/e, inf).
/// Throws std::domain_error for x < -1/e or NaN.
double lambert_w0(double x);

/// W0(exp(y)) for any real y, without forming exp(y). For large y this is
/// the root of w + ln(w) = y.
double lambert_w0_exp(double y);

}  // namespace vtx
