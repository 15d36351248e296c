#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wgt/engine.hpp"
#include "wgt/errors.hpp"

using namespace wgt;

namespace {

ObjectiveEnsemble square_objective() {
  // f(x) = x^2 in one dimension
  return ObjectiveEnsemble({QuadraticObjective(Matrix::Identity(1, 1), Vector::Zero(1), 0.0)});
}

Matrix column_sums(const Matrix& m) { return m.colwise().sum(); }

}  // namespace

TEST_CASE("lambda schedule") {
  const auto lam = LambdaSchedule::decaying(0.8, 10.0);
  CHECK(lam(1) == doctest::Approx(1.0 / 11.0));
  CHECK(lam(32) == doctest::Approx(1.0 / (std::pow(32.0, 0.8) + 10.0)));
  for (std::size_t k = 1; k < 5000; ++k) REQUIRE(lam(k + 1) <= lam(k));
  CHECK(lam.sum_diverges());
  CHECK(lam.vanishes());
  CHECK_FALSE(LambdaSchedule::decaying(1.4, 0.0).sum_diverges());
  CHECK(LambdaSchedule::decaying(1.0, 0.0).sum_diverges());
  CHECK(LambdaSchedule::constant(0.3)(77) == 0.3);
  CHECK_FALSE(LambdaSchedule::constant(0.3).vanishes());
  CHECK_THROWS_AS(LambdaSchedule::decaying(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(LambdaSchedule::decaying(0.5, -1.0), ConfigError);
  CHECK_THROWS_AS(lam(0), DomainError);
}

TEST_CASE("step sizes") {
  const StepSizes s({0.1, 0.3, 0.2});
  CHECK(s.max() == 0.3);
  CHECK_FALSE(s.is_uniform());
  CHECK(StepSizes::uniform(4, 0.1).is_uniform());
  CHECK_THROWS_AS(StepSizes({0.1, 0.0}), ConfigError);
  CHECK_THROWS_AS(StepSizes(std::vector<double>{}), ConfigError);
}

TEST_CASE("single agent hand calculation") {
  const DirectedGraph g(1, {});
  const auto w = WeightSchedule(g, WeightScheme::uniform).matrices_at(1);
  const auto f = square_objective();
  const Matrix x1 = Matrix::Ones(1, 1);

  const auto ab0 = initial_state(f, x1, 1.0);
  CHECK(ab0.y(0, 0) == 2.0);
  const auto ab1 = ab_step(g, ab0, w, 0.5, f);
  CHECK(ab1.x(0, 0) == 0.0);
  CHECK(ab1.y(0, 0) == 0.0);

  const auto wg1 = wgt_step(g, initial_state(f, x1, 1.0), w, StepSizes::uniform(1, 0.5),
                            LambdaSchedule::constant(1.0), f);
  CHECK(wg1.x(0, 0) == 0.0);
  CHECK(wg1.y(0, 0) == 0.0);
}

TEST_CASE("single agent with unit weights is plain gradient descent") {
  const DirectedGraph g(1, {});
  const auto w = WeightSchedule(g, WeightScheme::uniform).matrices_at(1);
  const auto f = make_sensor_scenario(1, 3, 2, 0.01, 5);
  const double alpha = 0.002;
  Matrix x = Matrix::Constant(1, 2, 0.7);
  auto ab = initial_state(f, x, 1.0);
  auto wg = initial_state(f, x, 1.0);
  const auto lam = LambdaSchedule::constant(1.0);
  for (int k = 0; k < 200; ++k) {
    x = x - alpha * f.stacked_gradient(x);
    ab = ab_step(g, ab, w, alpha, f);
    wg = wgt_step(g, wg, w, StepSizes::uniform(1, alpha), lam, f);
    REQUIRE((ab.x - x).norm() <= 1e-12);
    REQUIRE((wg.x - x).norm() <= 1e-12);
  }
}

TEST_CASE("updates match the stacked matrix form") {
  const auto g = DirectedGraph::sensor_ring6();
  const WeightSchedule ws(g, WeightScheme::dithered, 0.5, 3);
  const auto f = make_sensor_scenario(6, 3, 2, 0.01, 2);
  const StepSizes steps({0.05, 0.1, 0.02, 0.07, 0.1, 0.03});
  const Vector alpha = Vector::Map(steps.values().data(), 6);
  const auto lam = LambdaSchedule::decaying(0.8, 10.0);

  auto s = initial_state(f, initial_states(6, 2, 9), lam(1));
  auto t = initial_state(f, initial_states(6, 2, 9), 1.0);
  for (std::size_t k = 1; k <= 30; ++k) {
    const auto w = ws.matrices_at(k);
    const Matrix X = w.A * (s.x - alpha.asDiagonal() * s.y);
    const Matrix Y = w.B * s.y + lam(k + 1) * f.stacked_gradient(X) - lam(k) * f.stacked_gradient(s.x);
    s = wgt_step(g, s, w, steps, lam, f);
    REQUIRE((s.x - X).norm() <= 1e-12 * (1.0 + X.norm()));
    REQUIRE((s.y - Y).norm() <= 1e-12 * (1.0 + Y.norm()));

    const Matrix Xab = w.A * t.x - 0.01 * t.y;
    const Matrix Yab = w.B * t.y + f.stacked_gradient(Xab) - f.stacked_gradient(t.x);
    t = ab_step(g, t, w, 0.01, f);
    REQUIRE((t.x - Xab).norm() <= 1e-12 * (1.0 + Xab.norm()));
    REQUIRE((t.y - Yab).norm() <= 1e-12 * (1.0 + Yab.norm()));
  }
}

TEST_CASE("messages carry what each channel is allowed to see") {
  const auto g = DirectedGraph::sensor_ring6();
  const auto w = WeightSchedule(g, WeightScheme::uniform).matrices_at(1);
  const auto f = make_sensor_scenario(6, 3, 2, 0.01, 1);
  const StepSizes steps({0.1, 0.2, 0.1, 0.1, 0.1, 0.1});
  const auto s = initial_state(f, initial_states(6, 2, 4), 0.5);
  const auto wm = emit_messages(g, s, w, Mode::wgt, steps);
  const auto am = emit_messages(g, s, w, Mode::ab, steps);
  REQUIRE(wm.x.rows() == 8);
  for (Eigen::Index e = 0; e < 8; ++e) {
    const auto [i, l] = g.edges()[static_cast<std::size_t>(e)];
    const auto r = static_cast<Eigen::Index>(i);
    CHECK((wm.x.row(e) - (s.x.row(r) - steps[i] * s.y.row(r))).norm() == 0.0);
    CHECK((am.x.row(e) - s.x.row(r)).norm() == 0.0);
    CHECK((wm.y.row(e) - w.B(static_cast<Eigen::Index>(l), r) * s.y.row(r)).norm() == 0.0);
  }
}

TEST_CASE("tracker sum follows the weighted gradient sum") {
  for (Mode mode : {Mode::ab, Mode::wgt}) {
    auto sc = testing::sensor_scenario(mode, mode == Mode::ab ? 0.0005 : 0.1, 2000);
    const auto r = run(sc);
    for (const auto& s : r.trajectory) {
      const Matrix g = sc.objective.stacked_gradient(s.x);
      const double scale = 1.0 + g.norm();
      REQUIRE((column_sums(s.y) - sc.weight(s.k) * column_sums(g)).norm() <= 1e-10 * scale);
    }
  }
}

TEST_CASE("replay from the transcript is bit-exact") {
  for (Mode mode : {Mode::ab, Mode::wgt}) {
    for (WeightScheme scheme : {WeightScheme::uniform, WeightScheme::dithered}) {
      auto sc = testing::sensor_scenario(mode, mode == Mode::ab ? 0.0005 : 0.1, 300);
      sc.weights = WeightSchedule(DirectedGraph::sensor_ring6(), scheme, 0.4, 12);
      const auto r = run(sc);
      REQUIRE(r.transcript.size() == 300);
      const auto again = replay(sc, r.transcript);
      REQUIRE(again.size() == r.trajectory.size());
      for (std::size_t k = 0; k < again.size(); ++k) {
        REQUIRE(again[k].x == r.trajectory[k].x);
        REQUIRE(again[k].y == r.trajectory[k].y);
      }
    }
  }
}

TEST_CASE("run bookkeeping") {
  auto sc = testing::sensor_scenario(Mode::wgt, 0.1, 0);
  auto r = run(sc);
  CHECK(r.report.rows.size() == 1);
  CHECK(r.report.rows[0].residual == 1.0);
  CHECK(r.report.rows[0].weight == doctest::Approx(1.0 / 11.0));
  CHECK(r.report.phi_weighted);

  sc.iterations = 1;
  r = run(sc);
  CHECK(r.report.rows.size() == 2);
  CHECK(r.report.rows[1].k == 2);

  sc.iterations = 500;
  const auto a = run(sc, RunOptions{false, false});
  const auto b = run(sc, RunOptions{false, false});
  REQUIRE(a.report.rows.size() == b.report.rows.size());
  for (std::size_t k = 0; k < a.report.rows.size(); ++k) {
    CHECK(a.report.rows[k].residual == b.report.rows[k].residual);
    CHECK(a.report.rows[k].tracking_error == b.report.rows[k].tracking_error);
  }
  CHECK(a.transcript.size() == 0);
  CHECK(a.trajectory.empty());
}

TEST_CASE("scenario validation") {
  auto sc = testing::sensor_scenario(Mode::ab, 0.0005, 10);
  sc.steps = StepSizes({0.1, 0.1, 0.1, 0.1, 0.1, 0.2});
  CHECK_THROWS_AS(validate(sc), ConfigError);
  sc.steps = StepSizes::uniform(5, 0.1);
  CHECK_THROWS_AS(validate(sc), ConfigError);
}

TEST_CASE("AB baseline on the sensor scenario") {
  SUBCASE("alpha 0.0005 converges") {
    const auto r = run(testing::sensor_scenario(Mode::ab, 0.0005, 5000), RunOptions{false, false});
    CHECK(r.report.terminal_residual <= 1e-10);
  }
  SUBCASE("alpha 0.01 blows up") {
    CHECK_THROWS_AS(run(testing::sensor_scenario(Mode::ab, 0.01, 5000), RunOptions{false, false}),
                    DivergenceError);
  }
}

TEST_CASE("slower weight decay converges sooner") {
  const auto fast = run(testing::sensor_scenario(Mode::wgt, 0.1, 20000, 1, 0.8, 10.0), RunOptions{false, false});
  const auto slow = run(testing::sensor_scenario(Mode::wgt, 0.1, 20000, 1, 1.4, 10.0), RunOptions{false, false});
  REQUIRE(fast.report.iterations_to_threshold.has_value());
  if (slow.report.iterations_to_threshold) {
    CHECK(*fast.report.iterations_to_threshold < *slow.report.iterations_to_threshold);
  }
  CHECK(fast.report.terminal_residual < slow.report.terminal_residual);
}
