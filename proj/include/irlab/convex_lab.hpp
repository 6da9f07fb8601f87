#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "irlab/theory.hpp"

namespace irlab {

/// f(x) = 1/2 x^T A x - b^T x with A symmetric positive definite.
///
/// mu and L are the extreme eigenvalues of A; Lmax = max_i A_ii is the
/// coordinate-wise Lipschitz constant of the gradient. mu <= Lmax <= L.
class QuadraticProblem {
 public:
  /// Throws std::invalid_argument for non-square, mismatched, asymmetric
  /// (beyond 1e-10 absolute) or non-positive-definite (eigenvalue <= 1e-12) A.
  QuadraticProblem(Eigen::MatrixXd a, Eigen::VectorXd b);

  Eigen::Index dimension() const { return b_.size(); }
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& linear() const { return b_; }
  double mu() const { return mu_; }
  double smoothness() const { return smoothness_; }
  double lmax() const { return lmax_; }
  const Eigen::VectorXd& x_star() const { return x_star_; }
  double f_star() const { return f_star_; }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  // f(x) - f*, evaluated as 1/2 (x - x*)^T A (x - x*) to avoid cancellation.
  double gap(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double mu_ = 0.0;
  double smoothness_ = 0.0;
  double lmax_ = 0.0;
  Eigen::VectorXd x_star_;
  double f_star_ = 0.0;
};

QuadraticProblem make_quadratic(Eigen::MatrixXd a, Eigen::VectorXd b);

/// A = Q^T D Q with Q a random orthogonal factor and D log-uniform in
/// [1, condition_number]; D's extremes are pinned to 1 and condition_number so
/// the instance has exactly that condition number. b ~ N(0, I).
QuadraticProblem random_spd_problem(Eigen::Index d, double condition_number, std::uint64_t seed);

Eigen::VectorXd random_point(Eigen::Index d, std::uint64_t seed);

struct Iterate {
  std::int64_t t = 0;
  Eigen::VectorXd x;
  double f = 0.0;
  double gap = 0.0;
};

struct OptTrajectory {
  std::vector<Iterate> iterates;
  double rate_used = 0.0;
  double step_size = 0.0;
  std::vector<std::size_t> selector_log;  // empty for gradient descent
};

// Gradient descent with step 1/L; rate_used = 1 - mu/L.
OptTrajectory run_gd(const QuadraticProblem& p, const Eigen::VectorXd& x0, std::int64_t steps);

// argmax_i |grad_i|, lowest index on ties.
std::size_t gs_select(const QuadraticProblem& p, const Eigen::VectorXd& x);

/// Gauss-Southwell coordinate descent with step 1/Lmax. rate_used is
/// 1 - mu1/Lmax with mu1 defaulting to mu/d.
OptTrajectory run_gs_cd(const QuadraticProblem& p, const Eigen::VectorXd& x0, std::int64_t steps,
                        std::optional<double> mu1 = std::nullopt);

struct ComparisonReport {
  std::int64_t steps_global = 0;
  std::int64_t steps_local = 0;
  double mu = 0.0;
  double smoothness = 0.0;
  double mu1 = 0.0;
  double lmax = 0.0;
  double initial_gap = 0.0;
  double gd_final_gap = 0.0;
  double gs_final_gap = 0.0;
  double gd_bound = 0.0;
  double gs_bound = 0.0;
  // Evaluated at k = steps_local; absent when mu = L or mu1 = Lmax.
  std::optional<ConditionReport> condition;
  OptTrajectory gd;
  OptTrajectory gs;

  bool local_wins() const { return gs_final_gap <= gd_final_gap; }
};

/// Runs gradient descent and GS coordinate descent from the same x0 for as
/// many steps as the token budget buys each (replayed per-step costs, the
/// problem dimension acting as module count).
/// Throws std::invalid_argument when the budget cannot pay for one step of
/// either strategy or when c.modules() != d.
ComparisonReport budget_matched_compare(const QuadraticProblem& p, const CostModel& c,
                                        double budget, const Eigen::VectorXd& x0,
                                        std::optional<double> mu1 = std::nullopt);

}  // namespace irlab
