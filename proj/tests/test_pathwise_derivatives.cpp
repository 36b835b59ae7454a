#include <doctest.h>

#include <cmath>

#include "funcito/errors.hpp"
#include "funcito/finite_diff.hpp"
#include "funcito/functional.hpp"
#include "helpers.hpp"

using namespace funcito;
using testing::brownian;
using testing::make_lifted;
using testing::uniform_lifted;

TEST_CASE("horizontal derivative: quadratic martingale gives -v(t)") {
  auto F = quadratic_martingale_functional();
  auto p = brownian(5, 0, 256);
  FDConfig cfg;
  const double d = horizontal_derivative_fd(F, p, cfg);
  CHECK(d == doctest::Approx(-1.0).epsilon(1e-12));  // exact: extension adds v(t) h to the integral
}

TEST_CASE("horizontal derivative: f = t is exact, f = x^2 is zero") {
  FDConfig cfg;
  auto p = brownian(5, 1, 128);
  CHECK(horizontal_derivative_fd(catalog_lookup("smooth:t"), p, cfg) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(horizontal_derivative_fd(catalog_lookup("smooth:x2"), p, cfg) == 0.0);
}

TEST_CASE("horizontal two-mesh probe: delayed diverges, doleans agrees") {
  FDConfig cfg;
  auto p = uniform_lifted(512, 1.0, [](double t) { return std::sin(t); });

  auto bad = horizontal_two_mesh_check(delayed_functional(0.25), p, cfg);
  CHECK_FALSE(bad.agree);

  auto good = horizontal_two_mesh_check(doleans_functional(), p, cfg);
  CHECK(good.agree);

  for (std::uint64_t w = 0; w < 5; ++w) {
    auto b = brownian(77, w, 512);
    CHECK_FALSE(horizontal_two_mesh_check(delayed_functional(0.25), b, cfg).agree);
    CHECK(horizontal_two_mesh_check(doleans_functional(), b, cfg).agree);
  }
}

TEST_CASE("horizontal step shrinks near the functional's max_time") {
  Functional F = catalog_lookup("smooth:t");
  F.max_time = 1.0;
  auto p = uniform_lifted(10, 0.95, [](double t) { return t; });
  // one grid step (0.095) would cross 1.0; the estimator must use (1 - 0.95)/2
  FDConfig cfg;
  CHECK(cfg.effective_h(p, F.max_time) == doctest::Approx(0.025));
  CHECK(horizontal_derivative_fd(F, p, cfg) == doctest::Approx(1.0).epsilon(1e-12));

  auto at_T = uniform_lifted(10, 1.0, [](double t) { return t; });
  CHECK_THROWS_AS(horizontal_derivative_fd(F, at_T, cfg), DomainError);
}

TEST_CASE("vertical derivative: doleans near one, qv integral exactly zero") {
  FDConfig cfg;
  auto z = uniform_lifted(16, 1.0, [](double) { return 0.0; }, 0.0);  // x = 0, int v = 0
  auto vd = vertical_derivative_fd(doleans_functional(), z, cfg);
  CHECK(vd.gradient[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK_FALSE(vd.any_nondiff);

  auto p = brownian(9, 2, 64);
  auto vq = vertical_derivative_fd(catalog_lookup("qv_integral:x"), p, cfg);
  CHECK(vq.gradient[0] == 0.0);
}

TEST_CASE("vertical derivative: running max one-sided values and flag") {
  FDConfig cfg;
  auto F = running_max_functional();

  // endpoint strictly below the running max by much more than eps
  auto below = make_lifted({0.0, 0.5, 1.0}, {0.0, 1.0, 0.5});
  auto vb = vertical_derivative_fd(F, below, cfg);
  CHECK(vb.gradient[0] == 0.0);
  CHECK_FALSE(vb.any_nondiff);

  // endpoint exactly at the running max: flag with one-sided (1, 0)
  auto tie = make_lifted({0.0, 0.5, 1.0}, {0.0, 0.5, 0.5});
  auto vt = vertical_derivative_fd(F, tie, cfg);
  CHECK(vt.any_nondiff);
  CHECK(vt.right[0] == doctest::Approx(1.0));
  CHECK(vt.left[0] == doctest::Approx(0.0));

  // matches the closed-form one-sided oracle
  auto oracle = running_max_one_sided(tie, cfg.effective_eps(tie), cfg.nondiff_tol);
  CHECK(vt.right[0] == oracle.right);
  CHECK(vt.left[0] == oracle.left);
  CHECK(vt.nondiff[0] == oracle.nondiff);

  // endpoint strictly above: derivative 1, no flag
  auto above = make_lifted({0.0, 0.5, 1.0}, {0.0, 0.5, 0.9});
  auto va = vertical_derivative_fd(F, above, cfg);
  CHECK(va.gradient[0] == doctest::Approx(1.0));
  CHECK_FALSE(va.any_nondiff);
}

TEST_CASE("second vertical derivative: stencil exactness and smooth cases") {
  FDConfig cfg;
  auto p = brownian(13, 0, 64);

  // 3-point stencil is exact for endpoint quadratics
  auto h2 = second_vertical_fd(quadratic_martingale_functional(), p, cfg);
  CHECK(h2[0] == doctest::Approx(2.0).epsilon(1e-7));

  // linear cylindrical: zero
  auto C = catalog_lookup("cylindrical:0.25");
  CHECK(second_vertical_fd(C, p, cfg)[0] == 0.0);

  // doleans: hessian equals the value
  auto F = doleans_functional();
  const double val = F(p);
  CHECK(second_vertical_fd(F, p, cfg)[0] == doctest::Approx(val).epsilon(1e-6));
}

TEST_CASE("second vertical derivative: cross stencil on a 2-d functional") {
  // f(x) = x1 * x2: off-diagonal hessian 1, diagonal 0
  auto F = smooth_functional(
      "smooth2:xy", [](double, std::span<const double> x) { return x[0] * x[1]; },
      [](double, std::span<const double>) { return 0.0; },
      [](double, std::span<const double> x) { return Vec{x[1], x[0]}; },
      [](double, std::span<const double>) {
        return Mat{0.0, 1.0, 1.0, 0.0};
      });
  SimulationConfig cfg2;
  cfg2.dim = 2;
  cfg2.steps = 16;
  cfg2.seed = 3;
  auto p = sample_brownian(cfg2, 0);
  FDConfig cfg;
  auto h = second_vertical_fd(F, p, cfg);
  CHECK(h[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(h[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(h[2] == h[1]);
  CHECK(h[3] == doctest::Approx(0.0).epsilon(1e-9));

  auto vd = vertical_derivative_fd(F, p, cfg);
  CHECK(vd.gradient[0] == doctest::Approx(p.x().value(p.size() - 1)[1]).epsilon(1e-10));
  CHECK(vd.gradient[1] == doctest::Approx(p.x().value(p.size() - 1)[0]).epsilon(1e-10));
}

TEST_CASE("jet consistency: stencil-exact and smooth catalog functionals") {
  std::vector<LiftedPath> paths;
  for (std::uint64_t w = 0; w < 100; ++w) paths.push_back(brownian(2024, w, 512));
  FDConfig cfg;

  auto rq = jet_consistency_check(quadratic_martingale_functional(), paths, cfg);
  CHECK(rq.max_err_gradient <= 1e-9);
  CHECK(rq.max_err_hessian <= 1e-7);
  CHECK(rq.pass);

  auto rd = jet_consistency_check(doleans_functional(), paths, cfg);
  CHECK(rd.max_err_gradient <= 1e-6);
  CHECK(rd.pass);

  auto rs = jet_consistency_check(catalog_lookup("smooth:x2"), paths, cfg);
  CHECK(rs.max_err_horizontal == 0.0);
  CHECK(rs.pass);

  CHECK_THROWS_AS(jet_consistency_check(running_max_functional(), paths, cfg), ContractError);
}

TEST_CASE("halving eps cuts the central-difference error about fourfold") {
  auto F = doleans_functional();
  auto exact = [&](const LiftedPath& p) { return F.analytic_jet(p).gradient[0]; };
  FDConfig c1;
  c1.scale_eps_by_state = false;
  c1.eps_vertical = 1e-3;
  FDConfig c2 = c1;
  c2.eps_vertical = 5e-4;

  double worst_ratio_lo = 1e9, worst_ratio_hi = 0.0;
  for (std::uint64_t w = 0; w < 10; ++w) {
    auto p = brownian(99, w, 64);
    const double e1 = std::abs(vertical_derivative_fd(F, p, c1).gradient[0] - exact(p));
    const double e2 = std::abs(vertical_derivative_fd(F, p, c2).gradient[0] - exact(p));
    REQUIRE(e2 > 0.0);
    const double ratio = e1 / e2;
    worst_ratio_lo = std::min(worst_ratio_lo, ratio);
    worst_ratio_hi = std::max(worst_ratio_hi, ratio);
  }
  CHECK(worst_ratio_lo >= 3.0);
  CHECK(worst_ratio_hi <= 5.0);
}

TEST_CASE("vertical estimator never reads the final v sample when predictable") {
  FDConfig cfg;
  for (const auto& id : {"qv_integral:x", "quadratic_martingale", "doleans"}) {
    auto F = catalog_lookup(id);
    REQUIRE(F.predictable_in_v);
    auto p = brownian(7, 3, 32);
    auto base = vertical_derivative_fd(F, p, cfg);

    GridPath v = p.v();
    v.value(v.size() - 1)[0] = 777.0;  // sentinel
    auto poisoned = LiftedPath(p.x(), v);
    auto probed = vertical_derivative_fd(F, poisoned, cfg);
    CHECK(probed.gradient[0] == base.gradient[0]);
    CHECK(probed.right[0] == base.right[0]);
    CHECK(probed.left[0] == base.left[0]);
  }
}

TEST_CASE("forward scheme is one-sided") {
  FDConfig cfg;
  cfg.scheme = FDConfig::Scheme::Forward;
  auto p = brownian(15, 1, 32);
  auto F = catalog_lookup("smooth:x2");
  auto vd = vertical_derivative_fd(F, p, cfg);
  CHECK(vd.gradient[0] == vd.right[0]);
  // forward difference of x^2 has O(eps) bias, central is exact
  const double x_end = p.x().endpoint_scalar();
  CHECK(vd.right[0] == doctest::Approx(2.0 * x_end + cfg.effective_eps(p)).epsilon(1e-9));
}
