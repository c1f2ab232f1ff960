#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/lambert_w.hpp>

#include "oracles.hpp"
#include "vtx/lambert_w.hpp"

using vtx::lambert_w0;
using vtx::lambert_w0_exp;

TEST(LambertW, SpecialValues) {
  EXPECT_EQ(lambert_w0(0.0), 0.0);
  EXPECT_NEAR(lambert_w0(std::numbers::e), 1.0, 1e-14);
  EXPECT_NEAR(lambert_w0(1.0), 0.5671432904, 1e-10);
  EXPECT_NEAR(lambert_w0(1.0), oracle::lambert_bisection(1.0), 1e-14);
  EXPECT_NEAR(lambert_w0(-1.0 / std::numbers::e), -1.0, 1e-7);
}

TEST(LambertW, DomainErrors) {
  EXPECT_THROW(lambert_w0(-0.5), std::domain_error);
  EXPECT_THROW(lambert_w0(std::nan("")), std::domain_error);
}

TEST(LambertW, ResidualOverLogGrid) {
  const double branch = -1.0 / std::numbers::e;
  for (int i = 0; i <= 400; ++i) {
    const double x = branch + 1e-9 * std::pow(1e6 / 1e-9, i / 400.0);
    const double w = lambert_w0(x);
    ASSERT_LE(std::abs(w * std::exp(w) - x), 1e-12 * std::max(1.0, std::abs(x))) << "x=" << x;
  }
}

TEST(LambertW, AgreesWithBoost) {
  for (double x : {-0.3, -0.1, 1e-8, 0.5, 2.0, 10.0, 1e3, 1e6, 1e12}) {
    const double ref = boost::math::lambert_w0(x);
    EXPECT_NEAR(lambert_w0(x), ref, 1e-14 * std::max(1.0, std::abs(ref))) << "x=" << x;
  }
}

TEST(LambertW, ExpArgumentForm) {
  for (double y : {-30.0, -1.0, 0.0, 5.0, 19.9}) {
    EXPECT_NEAR(lambert_w0_exp(y), lambert_w0(std::exp(y)), 1e-13 * std::max(1.0, lambert_w0(std::exp(y))));
  }
  for (double y : {20.0, 100.0, 1e4, 1e8}) {
    const double w = lambert_w0_exp(y);
    EXPECT_NEAR(w + std::log(w), y, 1e-12 * y) << "y=" << y;
  }
}
