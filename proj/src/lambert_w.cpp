#include "vtx/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vtx {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double initial_guess(double x) {
  if (x < -0.25) {
    // Series about the branch point x = -1/e.
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  }
  if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x) || x < -kInvE) {
    throw std::domain_error("lambert_w0: argument " + std::to_string(x) + " below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  if (x - (-kInvE) <= 4.0 * std::numeric_limits<double>::epsilon()) return -1.0;

  double w = initial_guess(x);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    // Halley step.
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double lambert_w0_exp(double y) {
  if (std::isnan(y)) throw std::domain_error("lambert_w0_exp: NaN argument");
  if (y < 20.0) return lambert_w0(std::exp(y));
  // Newton on g(w) = w + ln w - y, g' = 1 + 1/w; w > 1 here so g is convex
  // and the iteration from the asymptotic guess converges monotonically.
  const double ly = std::log(y);
  double w = y - ly + ly / y;
  for (int iter = 0; iter < 64; ++iter) {
    const double g = w + std::log(w) - y;
    const double dw = g / (1.0 + 1.0 / w);
    w -= dw;
    if (std::abs(dw) <= 1e-16 * w) break;
  }
  return w;
}

}  // namespace vtx
