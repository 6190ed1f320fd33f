#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <variant>
#include <vector>

#include "onebit/rng.hpp"

namespace onebit {

/// A point mass of a discrete source.
struct Atom {
  double x;
  double mass;
};

/// Finite multiset of real samples, sorted nondecreasing at construction.
class SampleSet {
 public:
  explicit SampleSet(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index count() const { return values_.size(); }
  double mean() const;
  double variance() const;

 private:
  Eigen::VectorXd values_;
};

namespace detail {
struct UniformParams {
  double a;  // support [-a, a]
};
struct GaussianParams {
  double sigma;
};
struct LaplaceParams {
  double b;
};
struct TriangularParams {
  double a;  // support [-a, a]; sum of two independent uniform(a/2)
};
struct DiscreteParams {
  std::vector<Atom> atoms;  // sorted by location, masses summing to 1
};
struct TabulatedParams {
  double x0;
  double dx;
  Eigen::VectorXd pdf;       // nonnegative node values on the uniform grid
  Eigen::VectorXd cum_mass;  // cumulative cell masses, back() == 1
};
using SourceParams = std::variant<UniformParams, GaussianParams, LaplaceParams,
                                  TriangularParams, DiscreteParams,
                                  TabulatedParams>;
}  // namespace detail

enum class SourceKind { uniform, gaussian, laplace, triangular, discrete, tabulated };

/// A zero-mean scalar source with exact moment and tail queries. Closed-form
/// kinds answer analytically; tabulated sources integrate their piecewise
/// linear density exactly (trapezoid rule on the native grid, so accuracy is
/// the grid's responsibility).
class AnalyticSource {
 public:
  static AnalyticSource uniform(double half_width);
  static AnalyticSource gaussian(double sigma);
  static AnalyticSource laplace(double scale);
  static AnalyticSource triangular(double half_width);
  static AnalyticSource discrete(std::vector<Atom> atoms);
  /// Nodes at x0 + i*dx; the density is normalized at construction and must
  /// integrate to 1 within 1e-6 and have |mean| <= 1e-6 * half-range.
  static AnalyticSource tabulated(double x0, double dx, Eigen::VectorXd pdf);

  SourceKind kind() const;
  const detail::SourceParams& params() const { return params_; }
  const std::vector<Atom>& atoms() const;  // discrete kind only

  bool is_symmetric() const;
  bool is_log_concave() const;

 private:
  explicit AnalyticSource(detail::SourceParams p) : params_(std::move(p)) {}
  friend AnalyticSource scale(const AnalyticSource& src, double a);
  detail::SourceParams params_;
};

double variance(const AnalyticSource& src);
double abs_mean(const AnalyticSource& src);

/// P(X >= w). An atom exactly at w belongs to the upper cell.
double tail_prob(const AnalyticSource& src, double w);

/// E[X * 1{X >= w}], the unconditional partial mean; divide by tail_prob
/// for the conditional form.
double tail_partial_mean(const AnalyticSource& src, double w);

double median(const AnalyticSource& src);

/// n independent draws in draw order, deterministic given the stream's
/// (seed, id).
Eigen::VectorXd sample_values(const AnalyticSource& src, Eigen::Index n,
                              RngStream& stream);

/// n independent draws as a sorted SampleSet.
SampleSet sample(const AnalyticSource& src, Eigen::Index n, RngStream& stream);

/// The source of a*X for a != 0.
AnalyticSource scale(const AnalyticSource& src, double a);

/// The four-point family p(+-1) = delta, p(+-eps) = 0.5 - delta.
AnalyticSource x_eps_delta(double eps, double delta);

/// Loads a tabulated source from two-column CSV (x, pdf) with a header line.
AnalyticSource load_tabulated_csv(std::istream& in);

}  // namespace onebit
