#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rdpq/errors.hpp"
#include "rdpq/plant.hpp"

using namespace rdpq;
using std::numbers::pi;

namespace {

PlantConfig refConfig() {
  PlantConfig c;
  c.params = {11.0, 0.1};
  return c;
}

class ConstantInput final : public FeedbackLaw {
 public:
  explicit ConstantInput(double c) : c_(c) {}
  double input(const PlantState&) override { return c_; }
  Phase phase() const override { return Phase::Exact; }

 private:
  double c_;
};

void run(PlantState& s, double input, std::size_t steps) {
  for (std::size_t n = 0; n < steps; ++n) s.stepCN(input);
}

}  // namespace

TEST_CASE("configuration alignment") {
  auto c = refConfig();
  c.validate();
  CHECK(c.delaySteps() == 1000);
  CHECK(c.stepsPerInterval() == 5);
  c.intervals = 30;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = refConfig();
  c.dt = 3e-5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = refConfig();
  c.intervals = 300;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = refConfig();
  c.dt = -1e-4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("transport with zero inflow shifts the profile") {
  PlantState s(refConfig(), [](double) { return 0.0; }, [](double x) { return x; });
  CHECK(s.initialNorm() == doctest::Approx(1.0));
  run(s, 0.0, 500);
  CHECK(s.time() == doctest::Approx(0.05));
  const auto v = s.vField();
  const auto& grid = s.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    CAPTURE(x);
    // The characteristic through x = 1/2 leaves the boundary at t = 0, where
    // the zero-order-hold input takes over from v0.
    if (x < 0.5) {
      CHECK(v[i] == doctest::Approx(x + 0.5).epsilon(1e-12));
    } else {
      CHECK(v[i] == 0.0);
    }
  }
  CHECK(s.delayedInput() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("constant inflow fills the transport domain after one delay") {
  PlantState s(refConfig(), [](double x) { return std::sin(pi * x); }, [](double x) { return 1.0 - x; });
  run(s, 0.7, 1000);
  for (double v : s.vField()) CHECK(v == 0.7);
  CHECK(s.delayedInput() == 0.7);
  CHECK(s.u().back() == 0.7);
}

TEST_CASE("zero data stays zero") {
  PlantState s(refConfig(), [](double) { return 0.0; }, [](double) { return 0.0; });
  run(s, 0.0, 2000);
  for (double u : s.u()) CHECK(u == 0.0);
  CHECK(s.initialNorm() == 0.0);
}

TEST_CASE("the first eigenfunction grows at lambda - pi^2") {
  PlantState s(refConfig(), [](double x) { return std::sin(pi * x); }, [](double) { return 0.0; });
  run(s, 0.0, 5000);
  const double growth = std::exp((11.0 - pi * pi) * 0.5);
  double err = 0.0, ref = 0.0;
  const auto& grid = s.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = growth * std::sin(pi * grid.node(i));
    err = std::max(err, std::abs(s.u()[i] - exact));
    ref = std::max(ref, std::abs(exact));
  }
  CHECK(err / ref <= 1e-3);
}

TEST_CASE("a decaying mode matches the heat semigroup") {
  PlantConfig c = refConfig();
  c.params.lambda = 1.0;
  PlantState s(c, [](double x) { return std::sin(2.0 * pi * x); }, [](double) { return 0.0; });
  run(s, 0.0, 1000);
  const double factor = std::exp((1.0 - 4.0 * pi * pi) * 0.1);
  CHECK(s.u()[50] == doctest::Approx(factor * std::sin(2.0 * pi * 0.25)).epsilon(2e-3));
}

TEST_CASE("u0 is forced to vanish at the left end and u(1) follows the transport outflow") {
  PlantState s(refConfig(), [](double) { return 1.0; }, [](double) { return 0.25; });
  CHECK(s.u().front() == 0.0);
  CHECK(s.u().back() == 0.25);
  CHECK_THROWS(PlantState(refConfig(), std::vector<double>(10, 0.0), [](double) { return 0.0; }));
}

TEST_CASE("simulate records on the stride and at the end") {
  PlantState s(refConfig(), [](double x) { return std::sin(pi * x); }, [](double) { return 0.0; });
  ConstantInput law(0.0);
  std::size_t calls = 0;
  const auto traj = simulate(s, law, 0.0125, 50, [&](const PlantState&, double) { ++calls; });
  CHECK(calls == 126);  // every time level t_0 .. t_125
  REQUIRE(traj.records.size() == 4);  // t = 0, 0.005, 0.01 and the final 0.0125
  CHECK(traj.records.front().t == 0.0);
  CHECK(traj.records.back().t == doctest::Approx(0.0125));
  CHECK(traj.records.front().l2u == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
  CHECK(traj.records.front().phase == Phase::Exact);
  CHECK(traj.initialNorm == doctest::Approx(s.initialNorm()));
}

TEST_CASE("open-loop bound check") {
  PlantState zero(refConfig(), [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto r0 = openLoopBoundCheck(zero, 0.5, 100, 12.18, 1.13);
  CHECK(r0.passed);
  CHECK(r0.worstRatio == 0.0);

  PlantState eig(refConfig(), [](double x) { return std::sin(pi * x); }, [](double) { return 0.0; });
  const auto r = openLoopBoundCheck(eig, 0.5, 100, 12.18, 11.0 - pi * pi);
  CHECK(r.passed);
  CHECK(r.worstRatio < 1.0);
  // An overshoot below one cannot hold the initial value.
  const auto bad = openLoopBoundCheck(eig, 0.5, 100, 0.5, 11.0 - pi * pi);
  CHECK_FALSE(bad.passed);
}

TEST_CASE("identical runs write identical CSV") {
  auto once = [] {
    PlantState s(refConfig(), [](double x) { return std::sin(pi * x) + 0.1 * std::sin(3 * pi * x); },
                 [](double x) { return 0.2 * x; });
    ConstantInput law(0.05);
    auto traj = simulate(s, law, 0.2, 100);
    std::ostringstream out;
    writeCsv(out, traj);
    return out.str();
  };
  const auto a = once();
  CHECK(a == once());
  CHECK(a.rfind("t,l2_u,sup_v,mu,U,phase,bound\n", 0) == 0);
}

TEST_CASE("phase names") {
  CHECK(phaseName(Phase::OpenLoop) == "open-loop");
  CHECK(phaseName(Phase::Dwell) == "dwell");
}
