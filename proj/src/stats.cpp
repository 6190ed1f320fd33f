#include "onebit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace onebit {

BracketMax golden_max(const std::function<double(double)>& f, double lo,
                      double hi, double xtol) {
  constexpr double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  BracketMax best = (f1 >= f2) ? BracketMax{x1, f1} : BracketMax{x2, f2};
  while (b - a > xtol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
    const BracketMax cand = (f1 >= f2) ? BracketMax{x1, f1} : BracketMax{x2, f2};
    if (cand.fx > best.fx) best = cand;
  }
  return best;
}

namespace {

// Lower regularized gamma P(a, x) by series expansion; valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by Lentz continued fraction; x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double mean(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.size() > 0 ? v.mean() : 0.0;
}

double variance(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

double pearson_corr(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson_corr: size mismatch");
  const double mx = x.mean(), my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double sxy = (dx * dy).sum();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double ks_statistic(const Eigen::Ref<const Eigen::VectorXd>& sample,
                    const std::function<double(double)>& cdf) {
  std::vector<double> v(sample.data(), sample.data() + sample.size());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_two_sample(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b) {
  std::vector<double> va(a.data(), a.data() + a.size());
  std::vector<double> vb(b.data(), b.data() + b.size());
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  const double na = static_cast<double>(va.size());
  const double nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < va.size() && j < vb.size()) {
    const double t = std::min(va[i], vb[j]);
    while (i < va.size() && va[i] <= t) ++i;
    while (j < vb.size() && vb[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

std::pair<double, double> chi2_independence(
    const Eigen::Ref<const Eigen::VectorXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& y, int bins) {
  const Eigen::Index n = x.size();
  if (y.size() != n || n < bins * bins)
    throw std::invalid_argument("chi2_independence: too few observations");

  // Quantile bin edges; interior edges only.
  auto edges = [&](const Eigen::Ref<const Eigen::VectorXd>& v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    std::vector<double> e(static_cast<std::size_t>(bins) - 1);
    for (int k = 1; k < bins; ++k)
      e[static_cast<std::size_t>(k) - 1] =
          s[static_cast<std::size_t>((static_cast<double>(n) * k) / bins)];
    return e;
  };
  const auto ex = edges(x);
  const auto ey = edges(y);
  auto bin_of = [&](const std::vector<double>& e, double v) {
    return static_cast<int>(std::upper_bound(e.begin(), e.end(), v) -
                            e.begin());
  };

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(bins, bins);
  for (Eigen::Index i = 0; i < n; ++i)
    counts(bin_of(ex, x[i]), bin_of(ey, y[i])) += 1.0;

  const Eigen::VectorXd row = counts.rowwise().sum();
  const Eigen::VectorXd col = counts.colwise().sum();
  double stat = 0.0;
  for (int r = 0; r < bins; ++r)
    for (int c = 0; c < bins; ++c) {
      const double expected = row[r] * col[c] / static_cast<double>(n);
      if (expected > 0.0) {
        const double diff = counts(r, c) - expected;
        stat += diff * diff / expected;
      }
    }
  const double dof = static_cast<double>((bins - 1) * (bins - 1));
  return {stat, chi2_sf(stat, dof)};
}

}  // namespace onebit
