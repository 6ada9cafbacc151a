#include <doctest.h>

#include <sstream>

#include "spac/config.hpp"

using namespace spac;

namespace {

config::Config parse(const std::string& text) {
  std::istringstream in(text);
  return config::parse(in, "test");
}

}  // namespace

TEST_CASE("defaults without any input") {
  const auto c = parse("");
  CHECK(c.point.phi == doctest::Approx(kPi / 6));
  CHECK(c.point.r == 2.0);
  CHECK(!c.sweep.has_value());
  CHECK(c.policy.tail_tolerance == 1e-14);
}

TEST_CASE("point section with pi fractions and comments") {
  const auto c = parse(R"(
# SNR preset pointer
[point]
phi = pi/12      ; small weak value
delta = 5pi/12
r = 5
theta = pi/2
Gamma = 0.3
N = 100
)");
  CHECK(c.point.phi == doctest::Approx(kPi / 12));
  CHECK(c.point.delta == doctest::Approx(5 * kPi / 12));
  CHECK(c.point.theta == doctest::Approx(kPi / 2));
  CHECK(c.point.r == 5.0);
  CHECK(c.point.Gamma == 0.3);
  CHECK(c.point.N == 100);
}

TEST_CASE("sweep and truncation sections") {
  const auto c = parse(R"(
[point]
r = 3
[sweep]
axis = phi
start = 0
stop = pi/2
count = 11
outputs = dx, transition
series = demo
[truncation]
initial_n_max = 32
guard_band = 4
)");
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->axis == sweep::Axis::phi);
  CHECK(c.sweep->range.stop == doctest::Approx(kPi / 2));
  CHECK(c.sweep->range.count == 11);
  CHECK(c.sweep->outputs.size() == 2);
  CHECK(c.sweep->series == "demo");
  CHECK(c.sweep->fixed.r == 3.0);
  CHECK(c.policy.initial_n_max == 32);
  CHECK(c.policy.guard_band == 4);
}

TEST_CASE("overrides apply on top of a file") {
  auto c = parse("[point]\nphi = pi/3\n[sweep]\naxis = Gamma\nstart = 0.1\nstop = 1\ncount = 5\noutputs = chi\n");
  config::apply_overrides(c, {"Gamma=0.7", "point.r=4", "sweep.count=9", "truncation.tail_tolerance=1e-13"});
  CHECK(c.point.Gamma == 0.7);
  CHECK(c.point.r == 4.0);
  CHECK(c.point.phi == doctest::Approx(kPi / 3));
  CHECK(c.sweep->range.count == 9);
  CHECK(c.sweep->fixed.r == 4.0);
  CHECK(c.policy.tail_tolerance == 1e-13);
}

TEST_CASE("malformed configurations") {
  CHECK_THROWS_AS(parse("[point]\nphi = 3pi/2\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[point]\nr = -1\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[point]\nr = two\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[point]\ncolour = red\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[pointer]\nr = 1\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[point\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[point]\njust text\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[point]\nN = 0\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\nstart = 0\n"), config::ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\naxis = phi\nstart = 0\nstop = 1\ncount = 1\noutputs = dx\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\naxis = r\nstart = pi\nstop = 4\ncount = 3\noutputs = dx\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(parse("[sweep]\naxis = r\nstart = 0\nstop = 4\ncount = 3\noutputs = dx, magic\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(parse("[truncation]\ntail_tolerance = 0.1\n"), config::ConfigError);

  config::Config c;
  CHECK_THROWS_AS(config::apply_override(c, "phi"), config::ConfigError);
  CHECK_THROWS_AS(config::load("/nonexistent/spac.ini"), config::ConfigError);
}

TEST_CASE("error messages name the line") {
  try {
    parse("[point]\nphi = pi/6\nr = x\n");
    FAIL("expected a ConfigError");
  } catch (const config::ConfigError& e) {
    CHECK(std::string(e.what()).find("test:3") != std::string::npos);
  }
}
