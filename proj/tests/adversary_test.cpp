#include <doctest.h>

#include "support.hpp"
#include "wgt/adversary.hpp"
#include "wgt/errors.hpp"

using namespace wgt;

namespace {

Transcript two_agent_transcript(double forward, double backward, std::size_t iterations) {
  Transcript t;
  t.mode = Mode::wgt;
  t.agents = 2;
  t.channels = {{0, 1}, {1, 0}};
  t.dim = 1;
  for (std::size_t k = 0; k < iterations; ++k) {
    IterationMessages m{Matrix::Zero(2, 1), Matrix(2, 1)};
    m.y << forward, backward;
    t.iterations.push_back(m);
  }
  return t;
}

}  // namespace

TEST_CASE("z-stream of a symmetric exchange cancels") {
  const auto z = z_stream(two_agent_transcript(0.25, 0.25, 3), 0);
  REQUIRE(z.size() == 3);
  for (const auto& zk : z) CHECK(zk(0) == 0.0);
  CHECK(z_stream(two_agent_transcript(0.5, 0.25, 1), 1)[0](0) == doctest::Approx(-0.25));
}

TEST_CASE("broken transcripts are rejected") {
  auto t = two_agent_transcript(0.1, 0.1, 3);
  t.iterations[1].y = Matrix::Zero(1, 1);
  CHECK_THROWS_AS(z_stream(t, 0), AuditError);
  CHECK_THROWS_AS(z_stream(two_agent_transcript(0.1, 0.1, 1), 2), DomainError);
}

TEST_CASE("z-stream matches the tracker flow on every channel") {
  auto sc = testing::sensor_scenario(Mode::wgt, 0.1, 100);
  const auto r = run(sc);
  const auto& g = sc.graph();
  const auto w = sc.weights.matrices_at(1);
  for (AgentIndex i = 0; i < 6; ++i) {
    const auto z = z_stream(r.transcript, i);
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t k = 1; k <= 100; ++k) {
      const Matrix& y = r.trajectory[k - 1].y;
      Vector expect = Vector::Zero(2);
      for (AgentIndex l : g.out_neighbors(i)) expect += w.B(static_cast<Eigen::Index>(l), row) * y.row(row).transpose();
      for (AgentIndex j : g.in_neighbors(i)) expect -= w.B(row, static_cast<Eigen::Index>(j)) * y.row(static_cast<Eigen::Index>(j)).transpose();
      REQUIRE((z[k - 1] - expect).norm() <= 1e-14 * (1.0 + expect.norm()));
    }
  }
}

TEST_CASE("leakage identities hold at every iteration") {
  for (Mode mode : {Mode::ab, Mode::wgt}) {
    auto sc = testing::sensor_scenario(mode, mode == Mode::ab ? 0.0005 : 0.1, 2000);
    const auto r = run(sc);
    for (AgentIndex i = 0; i < 6; ++i) {
      for (double res : leakage_identity_residuals(sc, r, i)) REQUIRE(res <= 1e-9);
    }
  }
}

TEST_CASE("transcript attack: AB leaks, WGT does not") {
  SUBCASE("AB") {
    auto sc = testing::sensor_scenario(Mode::ab, 0.0005, 3000);
    const auto r = run(sc);
    REQUIRE(r.report.terminal_residual <= 1e-12);
    const auto rep = infer_gradient(r.transcript, 0, ground_truth(sc, r, 0));
    CHECK(rep.converged);
    REQUIRE(rep.relative_error_at_optimum.has_value());
    CHECK(*rep.relative_error_at_optimum <= 1e-4);
    // independent truth: gradient of agent 1 at the directly solved optimum
    const Vector g = sc.objective.agent(0).gradient(sc.objective.global_optimum());
    CHECK((rep.inferred_gradient - g).norm() <= 1e-4 * g.norm());
  }
  SUBCASE("WGT with decaying weights") {
    auto sc = testing::sensor_scenario(Mode::wgt, 0.1, 50000);
    const auto r = run(sc);
    const auto rep = infer_gradient(r.transcript, 0, ground_truth(sc, r, 0));
    CHECK(rep.converged);
    CHECK(rep.relative_error >= 0.9);
    CHECK(*rep.relative_error_at_optimum >= 0.9);
    CHECK(rep.within_leakage_bound);
  }
  SUBCASE("WGT with unit weights behaves like AB") {
    auto sc = testing::sensor_scenario(Mode::wgt, 0.0005, 3000);
    sc.lambda = LambdaSchedule::constant(1.0);
    const auto r = run(sc);
    const auto rep = infer_gradient(r.transcript, 0, ground_truth(sc, r, 0));
    CHECK(*rep.relative_error_at_optimum <= 1e-4);
  }
  SUBCASE("short run is inconclusive") {
    auto sc = testing::sensor_scenario(Mode::wgt, 0.1, 200);
    const auto r = run(sc);
    CHECK_FALSE(infer_gradient(r.transcript, 0, ground_truth(sc, r, 0)).converged);
  }
}

TEST_CASE("stabilization detector") {
  CHECK(messages_stabilized(two_agent_transcript(0.1, 0.2, 60)));
  CHECK_FALSE(messages_stabilized(two_agent_transcript(0.1, 0.2, 50)));
  auto t = two_agent_transcript(0.1, 0.2, 80);
  t.iterations[70].y(0, 0) += 1e-9;
  CHECK_FALSE(messages_stabilized(t));
  CHECK(messages_stabilized(t, DetectorSettings{1e-8, 50}));
}

TEST_CASE("generic audit systems") {
  const auto s32 = audit_state_system(3, 2);
  CHECK(s32.equations == 4);
  CHECK(s32.unknowns == 6);
  CHECK(s32.nullity >= 2);
  const auto s21 = audit_state_system(2, 1);
  CHECK(s21.equations == 1);
  CHECK(s21.unknowns == 2);
  CHECK(s21.nullity >= 1);
  const auto g12 = audit_gradient_system(1, 2);
  CHECK(g12.equations == 2);
  CHECK(g12.unknowns == 2);
  CHECK(g12.rank == 2);
  const auto g32 = audit_gradient_system(3, 2);
  CHECK(g32.equations == 6);
  CHECK(g32.unknowns == 10);
  CHECK(g32.nullity >= 4);
  for (std::size_t K = 2; K <= 12; ++K) {
    for (std::size_t p = 1; p <= 3; ++p) {
      const auto s = audit_state_system(K, p);
      CHECK(s.equations == (K - 1) * p);
      CHECK(s.unknowns == (K - 1) * (p + 1));
      CHECK(s.nullity >= K - 1);
      const auto g = audit_gradient_system(K, p);
      CHECK(g.equations == K * p);
      CHECK(g.unknowns == (2 * K - 1) * p);
      CHECK(g.nullity >= (K - 1) * p);
    }
  }
  CHECK_THROWS_AS(audit_state_system(1, 2), DomainError);
  CHECK_THROWS_AS(audit_gradient_system(0, 2), DomainError);
}

TEST_CASE("audits on recorded transcripts") {
  auto sc = testing::sensor_scenario(Mode::wgt, 0.1, 20);
  const auto r = run(sc);
  SUBCASE("agent 1 hears from one neighbor") {
    const auto s = audit_state_system(sc, r, 0, 10);
    CHECK(s.equations == 18);
    CHECK(s.unknowns == 27);
    CHECK(s.nullity >= 9);
    CHECK(s.rank + s.nullity == s.unknowns);
    REQUIRE(s.consistency_residual.has_value());
    CHECK(*s.consistency_residual <= 1e-12);
  }
  SUBCASE("agent 2 hears from two neighbors") {
    const auto s = audit_state_system(sc, r, 1, 10);
    CHECK(s.equations == 18);
    CHECK(s.unknowns == 9 * 2 + 9 * 2);
    CHECK(s.nullity >= 18);
    CHECK(*s.consistency_residual <= 1e-12);
  }
  SUBCASE("gradient system") {
    const auto g = audit_gradient_system(sc, r, 0, 10);
    CHECK(g.equations == 20);
    CHECK(g.unknowns == 38);
    CHECK(g.nullity >= 18);
    CHECK(*g.consistency_residual <= 1e-10);
  }
  SUBCASE("AB sends states in the clear") {
    auto ab = testing::sensor_scenario(Mode::ab, 0.0005, 20);
    const auto rab = run(ab);
    CHECK(audit_state_system(ab, rab, 0, 10).states_in_clear);
  }
  CHECK_THROWS_AS(audit_state_system(sc, r, 0, 30), AuditError);
}
