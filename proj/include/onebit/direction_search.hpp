#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "onebit/rng.hpp"
#include "onebit/scalar_quant.hpp"
#include "onebit/sources.hpp"
#include "onebit/stats.hpp"

namespace onebit {

/// A zero-mean random vector in R^dim, described by a sampler and, when
/// available, closed-form one-dimensional projections. The tags assert that
/// every projection <X, q> is symmetric / has a log-concave density, which
/// licenses the amenability-times-variance surrogate objective.
struct VectorSource {
  Eigen::Index dim = 0;
  /// Returns an n x dim matrix, one sample per row.
  std::function<Eigen::MatrixXd(Eigen::Index n, RngStream&)> sample;
  /// Exact law of <X, q> for unit q; empty when no closed form exists.
  std::function<AnalyticSource(const Eigen::VectorXd&)> analytic_projection;
  bool symmetric = false;
  bool log_concave_projections = false;
};

/// Validates that q is unit norm within 1e-12 and matches dim.
void check_direction(const VectorSource& src, const Eigen::VectorXd& q);

/// Flips q so its first nonzero coordinate is positive; q and -q induce the
/// same quantizer family.
Eigen::VectorXd canonical_hemisphere(Eigen::VectorXd q);

/// One-bit quantizer on R^dim: threshold the projection <x, direction> and
/// reconstruct with scalar reconstructions times the direction.
struct HilbertQuantizer {
  Eigen::VectorXd direction;
  OneBitQuantizer scalar;

  int encode(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return scalar.encode(direction.dot(x));
  }
  Eigen::VectorXd reconstruct(int bit) const {
    return scalar.decode(bit) * direction;
  }
};

enum class SearchStatus { completed, stalled, step_limit };

struct DirectionEval {
  Eigen::VectorXd direction;
  double objective;
};

struct SearchResult {
  Eigen::VectorXd best_direction;
  double vardrop;
  HilbertQuantizer quantizer;
  std::vector<DirectionEval> trace;
  SearchStatus status = SearchStatus::completed;
};

/// Projections <X_i, q> of n sampled vectors.
SampleSet project(const VectorSource& src, const Eigen::VectorXd& q,
                  Eigen::Index n, RngStream& stream);

/// Variance drop of the projection along q: the exact sweep when an analytic
/// projection is available, the empirical sweep otherwise.
McEstimate vardrop_along(const VectorSource& src, const Eigen::VectorXd& q,
                         Eigen::Index n, RngStream& stream,
                         Eigen::Index min_cell = 8);

/// (E|<X,q>|)^2, which equals zeta * Var of the projection. Valid only for
/// sources whose projections are all symmetric and log-concave, where it
/// coincides with the variance drop; cheaper and smoother than the sweep.
McEstimate objective_amen_var(const VectorSource& src, const Eigen::VectorXd& q,
                              Eigen::Index n, RngStream& stream);

/// Exhaustive direction search in dimension 2 over num_angles directions
/// (cos t, sin t), t uniform on [0, pi). All evaluations share one sample
/// set (common random numbers).
SearchResult grid_search_2d(const VectorSource& src, int num_angles,
                            Eigen::Index n, RngStream& stream);

struct AscentOptions {
  double fd_step = 1e-2;      // tangent finite-difference step, radians
  double init_step = 0.2;     // initial geodesic step, radians
  double min_step = 1e-4;
  int patience = 8;           // non-improving steps before a stall
  int restarts = 8;           // total starts: init plus restarts-1 random
};

/// Projected gradient ascent on the unit sphere with central finite
/// differences of the objective under common random numbers. Runs from the
/// given init plus random restarts and returns the best iterate found.
SearchResult ascent_search(const VectorSource& src, const Eigen::VectorXd& init,
                           int steps, Eigen::Index n, RngStream& stream,
                           const AscentOptions& opts = {});

/// Runs the scalar sweep on the projection along q and lifts the result.
HilbertQuantizer build_quantizer(const VectorSource& src,
                                 const Eigen::VectorXd& q, Eigen::Index n,
                                 RngStream& stream, Eigen::Index min_cell = 8);

/// Monte Carlo E||X - Q(X)||^2 over fresh samples.
McEstimate vector_mse(const VectorSource& src, const HilbertQuantizer& q,
                      Eigen::Index n, RngStream& stream);

/// dim iid copies of a scalar source.
VectorSource iid_source(const AnalyticSource& component, Eigen::Index dim);

/// Independent zero-mean gaussian coordinates with the given standard
/// deviations; projections are exactly gaussian.
VectorSource gaussian_source(Eigen::VectorXd stddevs);

/// Two iid Laplace(b) coordinates (variance 2 b^2 each); sampled only, no
/// analytic projection, so searches exercise the Monte Carlo path.
VectorSource laplace_pair(double b);

/// Closed-form E|<S, q>| for the iid Laplace(b) pair. For scales
/// beta_i = |q_i| b the absolute mean is
/// (beta1^2 + beta1 beta2 + beta2^2) / (beta1 + beta2).
double laplace_pair_abs_mean(double b, const Eigen::Vector2d& q);

/// A scalar source embedded along one coordinate axis, zero elsewhere.
VectorSource embedded_scalar_source(const AnalyticSource& component,
                                    Eigen::Index dim, Eigen::Index axis);

}  // namespace onebit
