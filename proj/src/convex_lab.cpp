#include "irlab/convex_lab.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace irlab {

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols()) {
    throw std::invalid_argument("make_quadratic: A must be square");
  }
  if (a_.rows() != b_.size() || b_.size() == 0) {
    throw std::invalid_argument("make_quadratic: A is " + std::to_string(a_.rows()) + "x" +
                                std::to_string(a_.cols()) + " but b has " +
                                std::to_string(b_.size()) + " entries");
  }
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("make_quadratic: A is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::invalid_argument("make_quadratic: eigen decomposition failed");
  }
  mu_ = eig.eigenvalues().minCoeff();
  smoothness_ = eig.eigenvalues().maxCoeff();
  if (mu_ <= 1e-12) {
    throw std::invalid_argument("make_quadratic: A is not positive definite (min eigenvalue " +
                                std::to_string(mu_) + ")");
  }
  lmax_ = a_.diagonal().maxCoeff();
  x_star_ = a_.ldlt().solve(b_);
  f_star_ = -0.5 * b_.dot(x_star_);
}

double QuadraticProblem::value(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

Eigen::VectorXd QuadraticProblem::gradient(const Eigen::VectorXd& x) const {
  return a_ * x - b_;
}

double QuadraticProblem::gap(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd e = x - x_star_;
  return 0.5 * e.dot(a_ * e);
}

QuadraticProblem make_quadratic(Eigen::MatrixXd a, Eigen::VectorXd b) {
  return QuadraticProblem(std::move(a), std::move(b));
}

QuadraticProblem random_spd_problem(Eigen::Index d, double condition_number, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("random_spd_problem: dimension must be >= 1");
  }
  if (!(condition_number >= 1.0)) {
    throw std::invalid_argument("random_spd_problem: condition number must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      g(i, j) = normal(rng);
    }
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();

  Eigen::VectorXd diag(d);
  const double log_kappa = std::log(condition_number);
  for (Eigen::Index i = 0; i < d; ++i) {
    diag(i) = std::exp(log_kappa * unit(rng));
  }
  diag(0) = 1.0;
  if (d > 1) {
    diag(d - 1) = condition_number;
  }

  Eigen::MatrixXd a = q.transpose() * diag.asDiagonal() * q;
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::VectorXd b(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    b(i) = normal(rng);
  }
  return QuadraticProblem(std::move(a), std::move(b));
}

Eigen::VectorXd random_point(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    x(i) = normal(rng);
  }
  return x;
}

namespace {

void check_start(const QuadraticProblem& p, const Eigen::VectorXd& x0, std::int64_t steps) {
  if (x0.size() != p.dimension()) {
    throw std::invalid_argument("x0 has dimension " + std::to_string(x0.size()) +
                                ", problem has " + std::to_string(p.dimension()));
  }
  if (steps < 0) {
    throw std::invalid_argument("step count must be >= 0");
  }
}

void record(OptTrajectory& out, const QuadraticProblem& p, std::int64_t t,
            const Eigen::VectorXd& x) {
  out.iterates.push_back({t, x, p.value(x), p.gap(x)});
}

}  // namespace

OptTrajectory run_gd(const QuadraticProblem& p, const Eigen::VectorXd& x0, std::int64_t steps) {
  check_start(p, x0, steps);
  OptTrajectory out;
  out.step_size = 1.0 / p.smoothness();
  out.rate_used = 1.0 - p.mu() / p.smoothness();
  out.iterates.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::VectorXd x = x0;
  record(out, p, 0, x);
  for (std::int64_t t = 1; t <= steps; ++t) {
    x -= out.step_size * p.gradient(x);
    record(out, p, t, x);
  }
  return out;
}

std::size_t gs_select(const QuadraticProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.dimension()) {
    throw std::invalid_argument("gs_select: dimension mismatch");
  }
  const Eigen::VectorXd g = p.gradient(x);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    if (std::abs(g(i)) > std::abs(g(best))) {
      best = i;
    }
  }
  return static_cast<std::size_t>(best);
}

OptTrajectory run_gs_cd(const QuadraticProblem& p, const Eigen::VectorXd& x0, std::int64_t steps,
                        std::optional<double> mu1) {
  check_start(p, x0, steps);
  const double effective_mu = mu1.value_or(p.mu() / static_cast<double>(p.dimension()));
  if (!(effective_mu > 0.0) || effective_mu > p.lmax()) {
    throw std::invalid_argument("run_gs_cd: mu1 must lie in (0, Lmax]");
  }
  OptTrajectory out;
  out.step_size = 1.0 / p.lmax();
  out.rate_used = 1.0 - effective_mu / p.lmax();
  out.iterates.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::VectorXd x = x0;
  record(out, p, 0, x);
  for (std::int64_t t = 1; t <= steps; ++t) {
    const std::size_t i = gs_select(p, x);
    const auto row = static_cast<Eigen::Index>(i);
    const double partial = p.matrix().row(row).dot(x) - p.linear()(row);
    x(row) -= out.step_size * partial;
    out.selector_log.push_back(i);
    record(out, p, t, x);
  }
  return out;
}

ComparisonReport budget_matched_compare(const QuadraticProblem& p, const CostModel& c,
                                        double budget, const Eigen::VectorXd& x0,
                                        std::optional<double> mu1) {
  if (c.modules() != p.dimension()) {
    throw std::invalid_argument("budget_matched_compare: cost model has p = " +
                                std::to_string(c.modules()) + " but the problem has d = " +
                                std::to_string(p.dimension()));
  }
  ComparisonReport r;
  r.steps_global = replayed_steps_within_budget(Strategy::global, budget, c);
  r.steps_local = replayed_steps_within_budget(Strategy::local, budget, c);
  r.mu = p.mu();
  r.smoothness = p.smoothness();
  r.mu1 = mu1.value_or(p.mu() / static_cast<double>(p.dimension()));
  r.lmax = p.lmax();

  r.gd = run_gd(p, x0, r.steps_global);
  r.gs = run_gs_cd(p, x0, r.steps_local, r.mu1);
  r.initial_gap = p.gap(x0);
  r.gd_final_gap = r.gd.iterates.back().gap;
  r.gs_final_gap = r.gs.iterates.back().gap;
  r.gd_bound = rate_bound(r.gd.rate_used, r.steps_global, r.initial_gap);
  r.gs_bound = rate_bound(r.gs.rate_used, r.steps_local, r.initial_gap);

  const RatePair rates(r.mu, r.smoothness, r.mu1, r.lmax);
  if (rates.global_rate() > 0.0 && rates.local_rate() > 0.0) {
    r.condition = superiority_condition(c, rates, r.steps_local);
  }
  return r;
}

}  // namespace irlab
