#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

namespace onebit {

/// Location and value of a maximum found by golden-section search.
struct BracketMax {
  double x;
  double fx;
};

/// A Monte Carlo estimate with its standard error (0 for exact values).
struct McEstimate {
  double value;
  double std_error;
};

/// Golden-section maximization of f on [lo, hi], down to an interval of
/// width xtol. Returns the best point actually evaluated, so a caller that
/// already holds a better candidate can keep it by comparison.
BracketMax golden_max(const std::function<double(double)>& f, double lo,
                      double hi, double xtol);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution with dof degrees.
inline double chi2_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

double mean(const Eigen::Ref<const Eigen::VectorXd>& v);
double variance(const Eigen::Ref<const Eigen::VectorXd>& v);
double pearson_corr(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y);

/// One-sample Kolmogorov-Smirnov statistic against a cdf; the sample need
/// not be sorted.
double ks_statistic(const Eigen::Ref<const Eigen::VectorXd>& sample,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b);

/// Pearson chi-square independence test on an r x c contingency table of
/// quantile-binned pairs. Returns {statistic, p_value}; dof = (r-1)(c-1).
std::pair<double, double> chi2_independence(
    const Eigen::Ref<const Eigen::VectorXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& y, int bins);

}  // namespace onebit
