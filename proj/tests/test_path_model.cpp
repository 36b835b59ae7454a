#include <doctest.h>

#include <cmath>
#include <sstream>

#include "funcito/errors.hpp"
#include "funcito/path.hpp"
#include "funcito/path_csv.hpp"
#include "funcito/rng.hpp"
#include "helpers.hpp"

using namespace funcito;
using testing::brownian;
using testing::make_lifted;
using testing::uniform_lifted;

TEST_CASE("restrict: constant path and identity case") {
  auto p = make_lifted({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
  auto r = restrict_path(p, 1.0);
  CHECK(r.horizon() == 1.0);
  CHECK(r.size() == 2);
  CHECK(r.x().scalar(0) == 1.0);
  CHECK(r.x().scalar(1) == 1.0);

  auto full = restrict_path(p, p.horizon());
  CHECK(full.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(full.time(i) == p.time(i));
    CHECK(full.x().scalar(i) == p.x().scalar(i));
  }
}

TEST_CASE("restrict: cadlag hold inserts the preceding value off-grid") {
  // hand evaluation on the 3-point grid {0, 0.5, 1} with x(u) = u
  auto p = make_lifted({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
  auto r = restrict_path(p, 0.75);
  REQUIRE(r.size() == 3);
  CHECK(r.time(2) == 0.75);
  CHECK(r.x().scalar(2) == 0.5);
  CHECK(r.x().scalar(1) == 0.5);
  CHECK_THROWS_AS(restrict_path(p, -0.1), DomainError);
  CHECK_THROWS_AS(restrict_path(p, 1.5), DomainError);
}

TEST_CASE("horizontal_extend: h = 0, constant path, whole grid steps") {
  auto p = make_lifted({0.0, 0.5, 1.0}, {3.0, 3.0, 3.0});
  auto same = horizontal_extend(p, 0.0);
  CHECK(same.size() == p.size());
  auto longer = horizontal_extend(p, 0.5);
  CHECK(longer.horizon() == 1.5);
  CHECK(longer.x().scalar(longer.size() - 1) == 3.0);

  // x(u) = u on mesh 0.25 extended by 0.5: frozen values 1, 1 appended
  auto ramp = uniform_lifted(4, 1.0, [](double t) { return t; });
  auto ext = horizontal_extend(ramp, 0.5);
  REQUIRE(ext.size() == 7);
  CHECK(ext.time(5) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(ext.time(6) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(ext.x().scalar(4) == 1.0);
  CHECK(ext.x().scalar(5) == 1.0);
  CHECK(ext.x().scalar(6) == 1.0);
  CHECK_THROWS_AS(horizontal_extend(ramp, -0.1), DomainError);
}

TEST_CASE("vertical_bump: zero bump, simple bump, involution") {
  auto p = uniform_lifted(4, 1.0, [](double) { return 0.0; });
  Vec zero{0.0};
  auto same = vertical_bump(p, zero);
  CHECK(same.x().jump_left.empty());

  Vec e{1.0};
  auto bumped = vertical_bump(p, e);
  CHECK(bumped.x().scalar(4) == 1.0);
  CHECK(bumped.x().scalar(3) == 0.0);
  REQUIRE(bumped.x().is_jump(4));
  CHECK(bumped.x().left_limit(4)[0] == 0.0);

  Vec minus{-1.0};
  auto back = vertical_bump(bumped, minus);
  CHECK(back.x().scalar(4) == 0.0);
  CHECK_FALSE(back.x().is_jump(4));

  Vec wrong{1.0, 2.0};
  CHECK_THROWS_AS(vertical_bump(p, wrong), DomainError);
}

TEST_CASE("vertical_bump changes exactly the last sample; extend changes none") {
  auto p = brownian(7, 0, 64);
  Vec e{0.25};
  auto b = vertical_bump(p, e);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) CHECK(b.x().scalar(i) == p.x().scalar(i));
  CHECK(b.x().scalar(p.size() - 1) == p.x().scalar(p.size() - 1) + 0.25);

  auto ext = horizontal_extend(p, 0.1);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(ext.x().scalar(i) == p.x().scalar(i));
}

TEST_CASE("restrict after horizontal_extend is the identity") {
  auto p = brownian(11, 3, 32);
  auto round_trip = restrict_path(horizontal_extend(p, 0.37), p.horizon());
  REQUIRE(round_trip.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(round_trip.time(i) == p.time(i));
    CHECK(round_trip.x().scalar(i) == p.x().scalar(i));
    CHECK(round_trip.v().scalar(i) == p.v().scalar(i));
  }
}

TEST_CASE("d_infinity: identity, constant offset, pure extension") {
  auto p = brownian(3, 1, 32);
  CHECK(d_infinity(p, p) == 0.0);

  auto q = vertical_bump(p, Vec{0.0});  // copy
  GridPath qx = q.x();
  for (std::size_t i = 0; i < qx.size(); ++i) qx.value(i)[0] += 0.7;
  auto shifted = LiftedPath(qx, q.v());
  CHECK(d_infinity(p, shifted) == doctest::Approx(0.7).epsilon(1e-12));

  auto ext = horizontal_extend(p, 0.25);
  CHECK(d_infinity(p, ext) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d_infinity(ext, p) == doctest::Approx(0.25).epsilon(1e-12));  // symmetrized
}

TEST_CASE("d_infinity is a metric on equal-horizon paths") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto a = brownian(100, 3 * s, 24);
    auto b = brownian(100, 3 * s + 1, 24);
    auto c = brownian(100, 3 * s + 2, 24);
    const double ab = d_infinity(a, b);
    const double ba = d_infinity(b, a);
    const double ac = d_infinity(a, c);
    const double cb = d_infinity(c, b);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= ac + cb + 1e-12);
  }
}

TEST_CASE("d_infinity on mismatched grids uses the union grid") {
  // same underlying cadlag function sampled on different grids
  auto coarse = make_lifted({0.0, 0.5, 1.0}, {0.0, 1.0, 1.0});
  auto fine = make_lifted({0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.0, 1.0, 1.0, 1.0});
  CHECK(d_infinity(coarse, fine) == 0.0);

  // differing only strictly between coarse grid points
  auto fine2 = make_lifted({0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.3, 1.0, 1.0, 1.0});
  CHECK(d_infinity(coarse, fine2) == doctest::Approx(0.3));
}

TEST_CASE("step_approximate: spec examples") {
  // continuous linear path, N = 4: error bounded by the dyadic mesh
  auto ramp = uniform_lifted(1000, 1.0, [](double t) { return t; });
  auto s4 = step_approximate(ramp.x(), 4);
  CHECK(s4.sup_error <= std::pow(2.0, -4) + 1e-12);
  CHECK(s4.sup_error > 0.0);

  auto flat = uniform_lifted(100, 1.0, [](double) { return 2.5; });
  CHECK(step_approximate(flat.x(), 3).sup_error == 0.0);

  // single declared jump of size 1 at u = 1/3: included once 1 > 1/N
  GridPath x;
  x.dim = 1;
  x.times = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  x.values = {0.0, 1.0, 1.0, 1.0};
  x.jump_left.emplace(1, Vec{0.0});
  auto s2 = step_approximate(x, 2);
  CHECK(s2.sup_error == 0.0);
  bool has_jump_time = false;
  for (double tau : s2.partition) has_jump_time = has_jump_time || tau == 1.0 / 3.0;
  CHECK(has_jump_time);
}

TEST_CASE("step_approximate: reported sup_error matches a direct recomputation") {
  auto p = brownian(21, 5, 200);
  for (int nd : {1, 3, 5}) {
    auto s = step_approximate(p.x(), nd);
    double direct = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      direct = std::max(direct, std::abs(p.x().scalar(i) - s.level_at(p.time(i))[0]));
    CHECK(s.sup_error == direct);
    // the step path agrees with the original at every partition point
    for (double tau : s.partition)
      CHECK(s.level_at(tau)[0] == p.x().value_at(tau)[0]);
  }
}

TEST_CASE("step_approximate: piecewise-constant paths reproduce exactly") {
  GridPath x;
  x.dim = 1;
  const std::size_t n = 500;
  x.times.resize(n + 1);
  x.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    x.times[i] = static_cast<double>(i) / static_cast<double>(n);
    x.values[i] = x.times[i] >= 0.3 ? (x.times[i] >= 0.7 ? 0.2 : 1.0) : 0.0;
  }
  x.jump_left.emplace(150, Vec{0.0});
  x.jump_left.emplace(350, Vec{1.0});
  // jumps 1.0 and 0.8 both exceed 1/N for N >= 2
  for (int nd : {2, 3, 6}) CHECK(step_approximate(x, nd).sup_error == 0.0);
  CHECK_THROWS_AS(step_approximate(x, 0), DomainError);
}

TEST_CASE("grid path validation rejects broken invariants") {
  GridPath x;
  x.dim = 1;
  x.times = {0.0, 1.0};
  x.values = {0.0, 1.0};
  CHECK_NOTHROW(x.validate());

  GridPath bad = x;
  bad.times = {0.5, 1.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = x;
  bad.times = {0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = x;
  bad.values = {0.0, std::nan("")};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = x;
  bad.values.push_back(2.0);
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("lifted path validation: symmetry and PSD tolerance") {
  GridPath x;
  x.dim = 2;
  x.times = {0.0, 1.0};
  x.values = {0.0, 0.0, 1.0, 1.0};

  GridPath v;
  v.dim = 4;
  v.times = {0.0, 1.0};
  v.values = {1.0, 0.2, 0.2, 1.0, 1.0, 0.2, 0.2, 1.0};
  CHECK_NOTHROW(LiftedPath(x, v));

  // tiny negative eigenvalue within tolerance: eigenvalues 2e-11 +- 1e-10
  GridPath v2 = v;
  v2.values = {2e-11, 1e-10, 1e-10, 2e-11, 1.0, 0.0, 0.0, 1.0};
  CHECK_NOTHROW(LiftedPath(x, v2));

  // clearly indefinite
  GridPath v3 = v;
  v3.values = {1.0, 2.0, 2.0, 1.0, 1.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(LiftedPath(x, v3), DomainError);

  // asymmetric
  GridPath v4 = v;
  v4.values = {1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(LiftedPath(x, v4), DomainError);

  // mismatched grids
  GridPath v5 = v;
  v5.times = {0.0, 2.0};
  CHECK_THROWS_AS(LiftedPath(x, v5), DomainError);
}

TEST_CASE("csv round-trip is bit-exact, including jumps") {
  auto base = brownian(31, 2, 16);
  auto p = vertical_bump(base, Vec{0.318309886183790671});
  std::ostringstream os;
  write_lifted_csv(os, p);
  std::istringstream is(os.str());
  auto q = read_lifted_csv(is);

  REQUIRE(q.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(q.time(i) == p.time(i));
    CHECK(q.x().scalar(i) == p.x().scalar(i));
    CHECK(q.v().scalar(i) == p.v().scalar(i));
  }
  REQUIRE(q.x().is_jump(p.size() - 1));
  CHECK(q.x().left_limit(p.size() - 1)[0] == p.x().left_limit(p.size() - 1)[0]);

  // header is the documented schema
  std::istringstream is2(os.str());
  std::string header;
  std::getline(is2, header);
  CHECK(header == "t,x_1,v_11,jump_flag");
}

TEST_CASE("csv round-trip preserves a 2-d path bit-exactly") {
  SimulationConfig cfg;
  cfg.dim = 2;
  cfg.steps = 8;
  cfg.seed = 5;
  auto p = sample_brownian(cfg, 0);
  std::ostringstream os;
  write_lifted_csv(os, p);
  std::istringstream is(os.str());
  auto q = read_lifted_csv(is);
  REQUIRE(q.dim() == 2);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int k = 0; k < 2; ++k) CHECK(q.x().value(i)[k] == p.x().value(i)[k]);
}

TEST_CASE("prefix walker reproduces restrict_path prefixes exactly") {
  auto p = brownian(17, 4, 32);
  PrefixWalker w(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto r = restrict_path(p, p.time(i));
    REQUIRE(w.path().size() == r.size());
    CHECK(w.path().horizon() == r.horizon());
    CHECK(w.path().x().scalar(i) == r.x().scalar(i));
    CHECK(w.path().integral_v(i)[0] == r.integral_v(i)[0]);
    w.advance();
  }
  CHECK_FALSE(w.advance());
}

TEST_CASE("prefix walker bump and extension restore state") {
  auto p = brownian(19, 6, 16);
  PrefixWalker w(p);
  w.advance();
  w.advance();
  const double before = w.path().x().scalar(w.length() - 1);
  const double bumped = w.with_bump(Vec{0.5}, [](const LiftedPath& q) {
    return q.x().scalar(q.size() - 1);
  });
  CHECK(bumped == before + 0.5);
  CHECK(w.path().x().scalar(w.length() - 1) == before);
  CHECK_FALSE(w.path().x().is_jump(w.length() - 1));

  const std::size_t len = w.length();
  const double ext_horizon = w.with_extension(0.1, [](const LiftedPath& q) {
    return q.horizon();
  });
  CHECK(ext_horizon == doctest::Approx(w.path().horizon() + 0.1));
  CHECK(w.length() == len);
}
