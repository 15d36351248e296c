#include "wgt/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wgt/errors.hpp"
#include "wgt/rng.hpp"

namespace wgt {

std::string to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uniform:
      return "uniform";
    case WeightScheme::dithered:
      return "dithered";
  }
  return "unknown";
}

WeightScheme weight_scheme_from_string(const std::string& s) {
  if (s == "uniform") return WeightScheme::uniform;
  if (s == "dithered") return WeightScheme::dithered;
  throw ConfigError("unknown weight scheme '" + s + "'");
}

namespace {

// Support of row i of A / column i of B, ascending, self included.
std::vector<AgentIndex> with_self(const std::vector<AgentIndex>& nbrs, AgentIndex self) {
  std::vector<AgentIndex> s = nbrs;
  s.push_back(self);
  std::sort(s.begin(), s.end());
  return s;
}

WeightPair uniform_pair(const DirectedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  WeightPair w{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (AgentIndex i = 0; i < g.size(); ++i) {
    const auto row = with_self(g.in_neighbors(i), i);
    for (AgentIndex j : row) w.A(i, j) = 1.0 / static_cast<double>(row.size());
    const auto col = with_self(g.out_neighbors(i), i);
    for (AgentIndex l : col) w.B(l, i) = 1.0 / static_cast<double>(col.size());
  }
  return w;
}

// Random stochastic vector over `count` entries, mixed with uniform.
std::vector<double> dithered_weights(Rng& rng, std::size_t count, double jitter) {
  std::vector<double> u(count);
  double total = 0.0;
  for (double& v : u) {
    v = rng.uniform();
    total += v;
  }
  const double base = (1.0 - jitter) / static_cast<double>(count);
  std::vector<double> w(count);
  for (std::size_t t = 0; t < count; ++t) {
    const double share = total > 0.0 ? u[t] / total : 1.0 / static_cast<double>(count);
    w[t] = base + jitter * share;
  }
  return w;
}

}  // namespace

WeightSchedule::WeightSchedule(DirectedGraph graph, WeightScheme scheme, double jitter,
                               std::uint64_t seed)
    : graph_(std::move(graph)), scheme_(scheme), jitter_(jitter), seed_(seed) {
  if (!graph_.is_strongly_connected()) {
    throw ConfigError("communication graph is not strongly connected");
  }
  if (!(jitter_ >= 0.0 && jitter_ < 1.0)) {
    throw ConfigError("weight jitter must lie in [0, 1)");
  }
  if (scheme_ == WeightScheme::uniform) jitter_ = 0.0;

  std::size_t max_in = 0;
  std::size_t max_out = 0;
  for (AgentIndex i = 0; i < graph_.size(); ++i) {
    max_in = std::max(max_in, graph_.in_neighbors(i).size());
    max_out = std::max(max_out, graph_.out_neighbors(i).size());
  }
  a_floor_ = (1.0 - jitter_) / static_cast<double>(max_in + 1);
  b_floor_ = (1.0 - jitter_) / static_cast<double>(max_out + 1);
  uniform_ = uniform_pair(graph_);
}

WeightPair WeightSchedule::matrices_at(std::size_t k) const {
  if (k == 0) throw DomainError("iterations are numbered from 1");
  if (scheme_ == WeightScheme::uniform) return uniform_;

  const auto n = static_cast<Eigen::Index>(graph_.size());
  WeightPair w{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  Rng rng(seed_, k);
  for (AgentIndex i = 0; i < graph_.size(); ++i) {
    const auto row = with_self(graph_.in_neighbors(i), i);
    const auto vals = dithered_weights(rng, row.size(), jitter_);
    for (std::size_t t = 0; t < row.size(); ++t) w.A(i, row[t]) = vals[t];
  }
  for (AgentIndex i = 0; i < graph_.size(); ++i) {
    const auto col = with_self(graph_.out_neighbors(i), i);
    const auto vals = dithered_weights(rng, col.size(), jitter_);
    for (std::size_t t = 0; t < col.size(); ++t) w.B(col[t], i) = vals[t];
  }
  return w;
}

std::string admissibility_violation(const WeightPair& w, const DirectedGraph& g, double a_floor,
                                    double b_floor, double tol) {
  const auto n = static_cast<Eigen::Index>(g.size());
  std::ostringstream msg;
  if (w.A.rows() != n || w.A.cols() != n || w.B.rows() != n || w.B.cols() != n) {
    msg << "weight matrices must be " << n << "x" << n;
    return msg.str();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(w.A.row(i).sum() - 1.0) > tol) {
      msg << "row " << i + 1 << " of A sums to " << w.A.row(i).sum();
      return msg.str();
    }
    if (std::abs(w.B.col(i).sum() - 1.0) > tol) {
      msg << "column " << i + 1 << " of B sums to " << w.B.col(i).sum();
      return msg.str();
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool a_allowed = i == j || g.has_edge(static_cast<AgentIndex>(j), static_cast<AgentIndex>(i));
      const double a = w.A(i, j);
      if (a_allowed ? a < a_floor : a != 0.0) {
        msg << "A(" << i + 1 << "," << j + 1 << ") = " << a << " violates the graph pattern or floor";
        return msg.str();
      }
      // B(i, j): weight agent j puts on its message to i.
      const bool b_allowed = i == j || g.has_edge(static_cast<AgentIndex>(j), static_cast<AgentIndex>(i));
      const double b = w.B(i, j);
      if (b_allowed ? b < b_floor : b != 0.0) {
        msg << "B(" << i + 1 << "," << j + 1 << ") = " << b << " violates the graph pattern or floor";
        return msg.str();
      }
    }
  }
  return {};
}

std::vector<Vector> pi_sequence(const WeightSchedule& ws, std::size_t horizon) {
  if (horizon == 0) throw DomainError("pi_sequence needs a horizon >= 1");
  const auto n = static_cast<Eigen::Index>(ws.graph().size());
  std::vector<Vector> out;
  out.reserve(horizon);
  out.push_back(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  for (std::size_t k = 1; k < horizon; ++k) {
    out.push_back(ws.matrices_at(k).B * out.back());
  }
  return out;
}

Vector phi_static(const Matrix& A, const PowerIterationSettings& settings) {
  if (A.rows() != A.cols() || A.rows() == 0) throw DomainError("phi_static needs a square matrix");
  const Eigen::Index n = A.rows();
  Vector phi = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Matrix At = A.transpose();
  for (std::size_t it = 0; it < settings.max_iterations; ++it) {
    Vector next = At * phi;
    next /= next.sum();
    const double delta = (next - phi).lpNorm<1>();
    phi = std::move(next);
    if (delta < settings.tolerance) return phi;
  }
  throw NumericalError("left Perron vector did not converge within " +
                       std::to_string(settings.max_iterations) + " power iterations");
}

ContractionRadii contraction_radii(const Matrix& A, const Vector& phi, const Matrix& B,
                                   const Vector& pi) {
  const Eigen::Index n = A.rows();
  const Vector ones = Vector::Ones(n);
  return {spectral_radius(A - ones * phi.transpose()), spectral_radius(B - pi * ones.transpose())};
}

}  // namespace wgt
