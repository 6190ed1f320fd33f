#include "onebit/scalar_quant.hpp"

#include <cmath>
#include <stdexcept>

#include "onebit/stats.hpp"

namespace onebit {

namespace {

// Picks the larger objective; values within a relative 1e-12 band are tied
// and resolved toward the threshold closest to the median, then toward the
// lower threshold.
class BestCandidate {
 public:
  explicit BestCandidate(double median) : median_(median) {}

  bool valid() const { return has_; }
  double value() const { return value_; }
  double threshold() const { return threshold_; }

  bool offer(double value, double threshold) {
    if (!has_) {
      has_ = true;
      value_ = value;
      threshold_ = threshold;
      return true;
    }
    const double eps = 1e-12 * std::max(std::abs(value), std::abs(value_));
    if (value > value_ + eps) {
      value_ = value;
      threshold_ = threshold;
      return true;
    }
    if (value < value_ - eps) return false;
    const double d_new = std::abs(threshold - median_);
    const double d_old = std::abs(threshold_ - median_);
    if (d_new < d_old || (d_new == d_old && threshold < threshold_)) {
      value_ = std::max(value_, value);
      threshold_ = threshold;
      return true;
    }
    return false;
  }

 private:
  double median_;
  bool has_ = false;
  double value_ = 0.0;
  double threshold_ = 0.0;
};

VardropResult result_at(const AnalyticSource& src, double w, double vardrop) {
  const double p = tail_prob(src, w);
  const double tpm = tail_partial_mean(src, w);
  const OneBitQuantizer q{w, -tpm / (1.0 - p), tpm / p};
  const double err = std::max(variance(src) - vardrop, 0.0);
  return VardropResult{vardrop, w, q, err};
}

}  // namespace

double amenability(const AnalyticSource& src) {
  const double v = variance(src);
  if (!(v > 0.0)) throw std::invalid_argument("amenability: degenerate source");
  const double m = abs_mean(src);
  return m * m / v;
}

VardropResult vardrop_sweep(const AnalyticSource& src, const SweepSpec& spec) {
  const double var = variance(src);
  if (!(var > 0.0)) throw std::invalid_argument("vardrop_sweep: degenerate source");
  const double med = median(src);

  auto objective = [&](double w) -> double {
    const double p = tail_prob(src, w);
    if (p < spec.min_cell_prob || 1.0 - p < spec.min_cell_prob) return -1.0;
    const double tpm = tail_partial_mean(src, w);
    return tpm * tpm / (p * (1.0 - p));
  };

  BestCandidate best(med);

  if (src.kind() == SourceKind::discrete) {
    const auto& atoms = src.atoms();
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
      const double w = 0.5 * (atoms[i].x + atoms[i + 1].x);
      const double v = objective(w);
      if (v >= 0.0) best.offer(v, w);
    }
  } else {
    const double span = spec.span_sigmas * std::sqrt(var);
    const int m = spec.grid_points;
    const double step = 2.0 * span / static_cast<double>(m - 1);
    for (int i = 0; i < m; ++i) {
      const double w = -span + step * static_cast<double>(i);
      const double v = objective(w);
      if (v >= 0.0) best.offer(v, w);
    }
    if (best.valid()) {
      const BracketMax refined =
          golden_max(objective, best.threshold() - step, best.threshold() + step,
                     spec.refine_tol);
      if (refined.fx >= 0.0) best.offer(refined.fx, refined.x);
    }
  }

  if (!best.valid())
    throw std::invalid_argument("vardrop_sweep: no threshold with both cells above min_cell_prob");
  return result_at(src, best.threshold(), best.value());
}

VardropResult best_symmetric(const AnalyticSource& src) {
  const double var = variance(src);
  if (!(var > 0.0)) throw std::invalid_argument("best_symmetric: degenerate source");
  const double tpm = tail_partial_mean(src, 0.0);
  const double c = 2.0 * tpm;  // argmin of var - 4 c tpm + c^2
  const double drop = 4.0 * tpm * tpm;
  return VardropResult{drop, 0.0, OneBitQuantizer{0.0, -c, c},
                       std::max(var - drop, 0.0)};
}

LloydResult lloyd_max(const AnalyticSource& src, double init_threshold,
                      double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("lloyd_max: tol must be positive");
  if (!(variance(src) > 0.0))
    throw std::invalid_argument("lloyd_max: degenerate source");
  constexpr double kEmptyCell = 1e-12;

  double w = init_threshold;
  OneBitQuantizer q{w, 0.0, 0.0};
  for (int it = 1; it <= max_iter; ++it) {
    const double p = tail_prob(src, w);
    if (p < kEmptyCell || 1.0 - p < kEmptyCell)
      return LloydResult{q, LloydStatus::empty_cell, it};
    const double tpm = tail_partial_mean(src, w);
    q = OneBitQuantizer{w, -tpm / (1.0 - p), tpm / p};
    const double w_next = 0.5 * (q.recon_low + q.recon_high);
    if (std::abs(w_next - w) < tol) {
      const double p2 = tail_prob(src, w_next);
      if (p2 < kEmptyCell || 1.0 - p2 < kEmptyCell)
        return LloydResult{q, LloydStatus::empty_cell, it};
      const double tpm2 = tail_partial_mean(src, w_next);
      q = OneBitQuantizer{w_next, -tpm2 / (1.0 - p2), tpm2 / p2};
      return LloydResult{q, LloydStatus::converged, it};
    }
    w = w_next;
  }
  return LloydResult{q, LloydStatus::step_limit, max_iter};
}

EmpiricalVardrop empirical_vardrop(const SampleSet& samples,
                                   Eigen::Index min_cell) {
  const Eigen::Index n = samples.count();
  if (min_cell < 1) throw std::invalid_argument("empirical_vardrop: min_cell < 1");
  if (n < 2 * min_cell)
    throw std::invalid_argument("empirical_vardrop: need at least 2*min_cell samples");

  const Eigen::VectorXd& v = samples.values();
  const double mu = v.mean();

  // Prefix sums over recentered values; total recentered sum is 0.
  Eigen::VectorXd pre1(n + 1), pre2(n + 1), praw(n + 1);
  pre1[0] = pre2[0] = praw[0] = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = v[i] - mu;
    pre1[i + 1] = pre1[i] + c;
    pre2[i + 1] = pre2[i] + c * c;
    praw[i + 1] = praw[i] + v[i];
  }

  const double med =
      (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  BestCandidate best(med);
  Eigen::Index best_i = -1;
  for (Eigen::Index i = min_cell; i <= n - min_cell; ++i) {
    if (!(v[i - 1] < v[i])) continue;  // equal values are not separable
    const double upper_sum = -pre1[i];
    const double obj = upper_sum * upper_sum /
                       (static_cast<double>(i) * static_cast<double>(n - i));
    const double w = 0.5 * (v[i - 1] + v[i]);
    if (best.offer(obj, w)) best_i = i;
  }
  if (best_i < 0)
    throw std::invalid_argument("empirical_vardrop: no separable threshold");

  const Eigen::Index i = best_i;
  const double w = best.threshold();
  const double vardrop = best.value();
  const double n_d = static_cast<double>(n);
  const double sample_var = pre2[n] / n_d;
  const OneBitQuantizer q{w, praw[i] / static_cast<double>(i),
                          (praw[n] - praw[i]) / static_cast<double>(n - i)};
  VardropResult res{vardrop, w, q, std::max(sample_var - vardrop, 0.0)};

  // Delta-method variance of mu_y^2 / (p(1-p)) at the chosen threshold.
  const double p = static_cast<double>(n - i) / n_d;
  const double mu_y = -pre1[i] / n_d;
  const double ey2 = (pre2[n] - pre2[i]) / n_d;
  const double var_y = std::max(ey2 - mu_y * mu_y, 0.0);
  const double cov_yb = mu_y * (1.0 - p);
  const double var_b = p * (1.0 - p);
  const double g_mu = 2.0 * mu_y / (p * (1.0 - p));
  const double g_p = mu_y * mu_y * (2.0 * p - 1.0) / (var_b * var_b);
  const double var_v =
      (g_mu * g_mu * var_y + 2.0 * g_mu * g_p * cov_yb + g_p * g_p * var_b) / n_d;
  return EmpiricalVardrop{res, std::sqrt(std::max(var_v, 0.0))};
}

double mse(const AnalyticSource& src, const OneBitQuantizer& q) {
  const double var = variance(src);
  const double p = tail_prob(src, q.threshold);
  const double tpm = tail_partial_mean(src, q.threshold);
  return var - 2.0 * tpm * (q.recon_high - q.recon_low) +
         q.recon_low * q.recon_low * (1.0 - p) +
         q.recon_high * q.recon_high * p;
}

}  // namespace onebit
