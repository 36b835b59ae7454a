#include <doctest.h>

#include <cmath>

#include "funcito/errors.hpp"
#include "funcito/rng.hpp"
#include "funcito/simulate.hpp"
#include "helpers.hpp"

using namespace funcito;

TEST_CASE("philox 4x64-10 matches reference blocks") {
  // reference outputs generated with numpy.random.Philox (4x64, 10 rounds)
  auto b0 = Philox4x64::block({0, 0, 0, 0}, {0, 0});
  CHECK(b0[0] == 0x16554d9eca36314cULL);
  CHECK(b0[1] == 0xdb20fe9d672d0fdcULL);
  CHECK(b0[2] == 0xd7e772cee186176bULL);
  CHECK(b0[3] == 0x7e68b68aec7ba23bULL);

  auto b1 = Philox4x64::block({1, 0, 0, 0}, {0, 0});
  CHECK(b1[0] == 0x02f4ba6408e4d89bULL);
  CHECK(b1[1] == 0x3dd62b0b9ca8c5b2ULL);
  CHECK(b1[2] == 0x1c8667a55d902e79ULL);
  CHECK(b1[3] == 0x907d7a052fd5b4dcULL);

  auto b2 = Philox4x64::block({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL,
                               0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                              {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  CHECK(b2[0] == 0x69cb1191c5f276acULL);
  CHECK(b2[1] == 0xae4698db8f7a2330ULL);
  CHECK(b2[2] == 0xa8abc9d306ba398fULL);
  CHECK(b2[3] == 0xf043802eb134aaf7ULL);
}

TEST_CASE("normal stream raw blocks follow the (block, stream) counter layout") {
  auto w0 = NormalStream::raw_block(42, 0, 0);
  CHECK(w0[0] == 0x4dafeedc3167879fULL);  // counter (0,0,0,0), key (42, stream constant)
  auto w7 = NormalStream::raw_block(42, 7, 1);
  CHECK(w7[0] == 0x27d95f7986c37b0cULL);  // counter (1,7,0,0)
}

TEST_CASE("brownian sampling: one step equals sqrt(T) times the first draw") {
  SimulationConfig cfg;
  cfg.steps = 1;
  cfg.horizon = 0.49;
  cfg.seed = 123;
  auto p = sample_brownian(cfg, 4);
  NormalStream z(123, 4);
  CHECK(p.x().scalar(1) == std::sqrt(0.49) * z.next());
  CHECK(p.x().scalar(0) == 0.0);
  CHECK(p.v().scalar(0) == 1.0);
  CHECK(p.v().scalar(1) == 1.0);
}

TEST_CASE("brownian sampling is reproducible and streams are distinct") {
  SimulationConfig cfg;
  cfg.steps = 64;
  cfg.seed = 7;
  auto a = sample_brownian(cfg, 11);
  auto b = sample_brownian(cfg, 11);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.x().scalar(i) == b.x().scalar(i));

  auto c = sample_brownian(cfg, 12);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || a.x().scalar(i) != c.x().scalar(i);
  CHECK(any_diff);

  SimulationConfig other = cfg;
  other.seed = 8;
  auto d = sample_brownian(other, 11);
  CHECK(d.x().scalar(64) != a.x().scalar(64));
}

TEST_CASE("brownian terminal mean obeys the CLT bound") {
  SimulationConfig cfg;
  cfg.steps = 1;
  cfg.horizon = 1.0;
  cfg.seed = 314;
  const std::size_t m = 100000;
  KahanSum sum;
  for (std::size_t w = 0; w < m; ++w) sum.add(sample_brownian(cfg, w).x().scalar(1));
  const double mean = sum.value() / static_cast<double>(m);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("scaled brownian is the scaled path with matching v") {
  SimulationConfig cfg;
  cfg.steps = 128;
  cfg.seed = 9;
  auto w = sample_brownian(cfg, 3);

  SimulationConfig scfg = cfg;
  scfg.model = SimulationConfig::Model::ScaledBrownian;
  scfg.scale = 2.5;
  auto p = sample_ito_process(scfg, 3);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(p.x().scalar(i) == doctest::Approx(2.5 * w.x().scalar(i)).epsilon(1e-14));
    CHECK(p.v().scalar(i) == doctest::Approx(6.25).epsilon(1e-15));
  }
}

TEST_CASE("singular sigma raises a simulation error") {
  SimulationConfig cfg;
  cfg.model = SimulationConfig::Model::StateDependent;
  cfg.steps = 8;
  cfg.sigma = [](double, std::span<const double>) { return Mat{0.0}; };
  CHECK_THROWS_AS(sample_ito_process(cfg, 0), SimulationError);

  // a sigma decaying through the floor mid-path is also caught
  SimulationConfig cfg2 = cfg;
  cfg2.sigma = [](double t, std::span<const double>) { return Mat{t < 0.5 ? 1.0 : 1e-9}; };
  CHECK_THROWS_AS(sample_ito_process(cfg2, 0), SimulationError);
}

TEST_CASE("realized qv concentrates around the integrated density") {
  SimulationConfig cfg;
  cfg.model = SimulationConfig::Model::ScaledBrownian;
  cfg.scale = 1.0;
  cfg.steps = 10000;
  cfg.seed = 2718;
  auto p = sample_ito_process(cfg, 0);
  const double rq = realized_qv(p)[0];
  const double iv = p.integral_v_total()[0];
  CHECK(std::abs(rq - iv) / iv <= 5.0 * std::sqrt(2.0 / static_cast<double>(cfg.steps)));
}

TEST_CASE("realized qv converges to int v dt in mean square at rate -1/2") {
  Vec rms;
  std::vector<std::size_t> grids = {100, 1000, 10000};
  for (std::size_t n : grids) {
    SimulationConfig cfg;
    cfg.steps = n;
    cfg.seed = 55;
    KahanSum sq;
    const std::size_t m = 200;
    for (std::size_t w = 0; w < m; ++w) {
      auto p = sample_brownian(cfg, w);
      const double gap = realized_qv(p)[0] - p.integral_v_total()[0];
      sq.add(gap * gap);
    }
    rms.push_back(std::sqrt(sq.value() / static_cast<double>(m)));
  }
  double slope = 0.0;
  {
    // two-point check on the extreme grid sizes
    slope = (std::log(rms.back()) - std::log(rms.front())) /
            (std::log(static_cast<double>(grids.back())) - std::log(static_cast<double>(grids.front())));
  }
  CHECK(slope >= -0.65);
  CHECK(slope <= -0.35);
}

TEST_CASE("state-dependent sigma yields symmetric PSD v at every grid point") {
  SimulationConfig cfg;
  cfg.model = SimulationConfig::Model::StateDependent;
  cfg.dim = 2;
  cfg.steps = 128;
  cfg.seed = 77;
  cfg.sigma = [](double t, std::span<const double> x) {
    return Mat{1.0, 0.3 * std::sin(x[0]), 0.0, 1.0 + 0.2 * std::cos(x[1] + t)};
  };
  auto p = sample_ito_process(cfg, 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto vi = p.v().value(i);
    CHECK(asymmetry(vi, 2) == 0.0);
    auto [lo, hi] = sym_eig_range(vi, 2);
    CHECK(lo >= -LiftedPath::kPsdTol * hi);
  }
}

TEST_CASE("config validation rejects malformed simulations") {
  SimulationConfig cfg;
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimulationConfig{};
  cfg.horizon = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimulationConfig{};
  cfg.model = SimulationConfig::Model::StateDependent;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimulationConfig{};
  cfg.x0 = {1.0, 2.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("uniform stream stays in the open unit interval") {
  UniformStream u(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
}
