#pragma once

#include <Eigen/Dense>

#include "onebit/sources.hpp"

namespace onebit {

/// Threshold quantizer on the real line: x maps to the high cell iff
/// x >= threshold (an atom at the threshold belongs to the upper cell).
struct OneBitQuantizer {
  double threshold;
  double recon_low;
  double recon_high;

  int encode(double x) const { return x >= threshold ? 1 : 0; }
  double decode(int bit) const { return bit ? recon_high : recon_low; }
  double operator()(double x) const { return decode(encode(x)); }
};

/// Outcome of a variance-drop maximization: the achieved drop, the
/// maximizing threshold, the induced Lloyd quantizer and its mse.
struct VardropResult {
  double vardrop;
  double argmax_threshold;
  OneBitQuantizer quantizer;
  double mse;
};

/// Candidate-threshold layout for the analytic sweep. Continuous kinds scan
/// an equally spaced grid over mean +- span_sigmas standard deviations and
/// refine around the best point; discrete kinds enumerate atom midpoints.
struct SweepSpec {
  int grid_points = 4097;
  double span_sigmas = 8.0;
  double refine_tol = 1e-10;
  double min_cell_prob = 1e-9;
};

/// zeta = E[|X|]^2 / E[X^2], in [0, 1].
double amenability(const AnalyticSource& src);

/// Maximizes the variance drop over thresholds, evaluating the stabilized
/// form (E[X 1{X>=w}])^2 / (P(X>=w) P(X<w)). Thresholds whose cells carry
/// probability below min_cell_prob are excluded from the sup. Ties are
/// broken toward the threshold closest to the median, then toward the
/// lower threshold.
VardropResult vardrop_sweep(const AnalyticSource& src, const SweepSpec& spec = {});

/// Best quantizer constrained to recon_low = -recon_high with threshold 0.
/// The optimal magnitude is the exact minimizer 2 E[X 1{X>=0}] of the
/// quadratic mse.
VardropResult best_symmetric(const AnalyticSource& src);

enum class LloydStatus { converged, step_limit, empty_cell };

struct LloydResult {
  OneBitQuantizer quantizer;  // last iterate when not converged
  LloydStatus status;
  int iterations;
};

/// Lloyd-Max iteration: centroid step (reconstructions = conditional cell
/// means) alternating with boundary step (threshold = recon midpoint) until
/// |delta threshold| < tol.
LloydResult lloyd_max(const AnalyticSource& src, double init_threshold,
                      double tol = 1e-12, int max_iter = 200);

struct EmpiricalVardrop {
  VardropResult result;
  /// Delta-method standard error at the selected threshold (threshold
  /// selection noise not included).
  double std_error;
};

/// Empirical sweep over sample midpoints with at least min_cell points on
/// each side, O(n) after the sort via prefix sums. Samples are recentered
/// to zero mean internally; the returned quantizer lives on the original
/// scale.
EmpiricalVardrop empirical_vardrop(const SampleSet& samples,
                                   Eigen::Index min_cell = 8);

/// E[(X - Q(X))^2] by exact integration/summation per kind.
double mse(const AnalyticSource& src, const OneBitQuantizer& q);

}  // namespace onebit
