#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "onebit/rng.hpp"
#include "onebit/stats.hpp"

namespace onebit {

/// One draw of the stationary sawbridge: drop location u and phase v.
struct SawbridgeDraw {
  double u;
  double v;
};

/// A function on [0,1] discretized at the left-endpoint grid t_i = i/n,
/// with inner product <f,g> = (1/n) sum f_i g_i.
struct PathGrid {
  Eigen::VectorXd values;
  Eigen::Index size() const { return values.size(); }
};

double grid_inner(const PathGrid& f, const PathGrid& g);
double grid_norm2(const PathGrid& f);

/// Grid mean of the path, i.e. its DC component.
double dc(const PathGrid& path);

/// Left-endpoint grid t_i = i/n.
Eigen::VectorXd grid_times(Eigen::Index n);

/// Nonstationary sawbridge path: values[i] = t_i - 1(t_i >= u).
PathGrid sample_nonstationary(double u, Eigen::Index n);

/// Stationary sawbridge path: the nonstationary path evaluated at
/// (t_i + v) mod 1, exactly (the formula is closed-form in t).
PathGrid sample_stationary(const SawbridgeDraw& draw, Eigen::Index n);

SawbridgeDraw sample_draw(RngStream& stream);

/// Autocorrelation of the stationary sawbridge:
/// K(s,t) = (s-t)^2/2 - |s-t|/2 + 1/6.
double autocorr(double s, double t);

/// Top-k eigenvalues (descending) of the discretized integral operator
/// K(t_i, t_j)/n.
Eigen::VectorXd discrete_eigs(Eigen::Index n, Eigen::Index k_top);

struct Eigensystem {
  Eigen::VectorXd eigenvalues;   // descending, k_top entries
  Eigen::MatrixXd eigenvectors;  // n x k_top, matching columns
};
Eigensystem discrete_eigensystem(Eigen::Index n, Eigen::Index k_top);

/// Karhunen-Loeve basis of the stationary sawbridge on the grid:
/// psi_1 = 1, psi_2k = sqrt(2) sin(2 pi k t), psi_2k+1 = sqrt(2) cos(2 pi k t)
/// with eigenvalues 1/12 and 1/(4 pi^2 k^2) (each twice).
struct KLBasis {
  Eigen::MatrixXd functions;   // n x (2 k_max + 1), one basis function per column
  Eigen::VectorXd eigenvalues; // matching order
  Eigen::Index k_max;
};
KLBasis make_kl_basis(Eigen::Index n, Eigen::Index k_max);

/// Coefficients G_k = <Y, psi_k> under the grid inner product.
Eigen::VectorXd kl_coeffs(const PathGrid& path, const KLBasis& basis);

struct QuantizedPath {
  int bit;
  PathGrid reconstruction;  // constant +-1/4
};

/// The optimal one-bit quantizer of the stationary sawbridge: bit is the
/// sign of the DC (a zero DC maps to bit 0), reconstructions are the
/// constant paths +-1/4.
QuantizedPath optimal_quantize(const PathGrid& path);

/// Monte Carlo E||Y - Q(Y)||^2 for the sign-of-DC quantizer with constant
/// reconstructions +-recon_magnitude.
McEstimate mc_mse(Eigen::Index num_paths, Eigen::Index n, RngStream& stream,
                  double recon_magnitude = 0.25);

/// DC/AC decomposition parameters of a unit-norm direction q:
/// q = dc_sign * sqrt(theta) + sqrt(1-theta) * g with g unit norm, zero mean.
/// For theta = 1 the AC direction is the zero path by convention.
struct DirectionSplit {
  double theta;
  int dc_sign;
  PathGrid ac_direction;
};
DirectionSplit direction_split(const PathGrid& q);

/// One path's projection split Z = sqrt(theta) Z_DC + sqrt(1-theta) Z_AC.
struct ProjectionSplit {
  double theta;
  double z_dc;
  double z_ac;
};
ProjectionSplit split_projection(const DirectionSplit& split, const PathGrid& y);
double reconstruct(const ProjectionSplit& p);

/// Independence diagnostics for (Z_DC, Z_AC) along a direction with
/// 0 < theta < 1: Pearson correlation against 3/sqrt(N), a chi-square
/// independence test on an 8x8 quantile-binned grid, and the variance
/// additivity Var Z = theta Var Z_DC + (1-theta) Var Z_AC.
struct IndependenceReport {
  double theta = 0.0;
  Eigen::Index num_paths = 0;
  double corr = 0.0;
  double corr_threshold = 0.0;
  double chi2 = 0.0;
  double p_value = 0.0;
  int dof = 0;
  double var_z = 0.0;
  double var_split_sum = 0.0;
  double additivity_threshold = 0.0;
  bool corr_pass = false;
  bool chi2_pass = false;
  bool additivity_pass = false;
};
IndependenceReport verify_dc_ac_independence(const PathGrid& q,
                                             Eigen::Index num_paths,
                                             RngStream& stream);

/// Same diagnostics for several directions against one shared path pool.
std::vector<IndependenceReport> verify_dc_ac_independence_many(
    const std::vector<PathGrid>& qs, Eigen::Index num_paths, RngStream& stream);

/// Per-direction outcome of the theta-regime checks. The variance check
/// applies when theta <= 5/8; the closed-form two-atom bound
/// ((a^2 + b c)/(2a))^2 at a = sqrt(theta)/2, b = sqrt(1-theta)/sqrt(12)
/// applies when theta > 5/8, with c taken from the oriented empirical AC
/// support. Every direction must keep its empirical variance drop below
/// 1/16 + 3 standard errors.
struct DirectionCheck {
  double theta = 0.0;
  double var_z = 0.0;
  double vardrop = 0.0;
  double vardrop_se = 0.0;
  double two_atom_bound = 0.0;  // NaN when theta <= 5/8
  bool vardrop_pass = false;
  bool var_pass = true;
  bool bound_pass = true;
  bool ac_support_flagged = false;
};

struct ThetaRegimesReport {
  std::vector<DirectionCheck> directions;
  int vardrop_violations = 0;
  int var_violations = 0;
  int bound_violations = 0;
  int flagged = 0;
};

/// Draws num_directions random unit directions in the span of the first
/// 2 k_max + 1 KL basis functions, stratified over theta with the last
/// direction at theta = 1 exactly, and runs the regime checks on each.
ThetaRegimesReport verify_theta_regimes(Eigen::Index num_directions,
                                        Eigen::Index num_paths,
                                        RngStream& stream,
                                        Eigen::Index n = 1024,
                                        Eigen::Index k_max = 16);

/// A random unit direction with DC content theta, AC part uniform on the
/// sphere of the given KL span.
PathGrid random_kl_direction(const KLBasis& basis, double theta, int dc_sign,
                             RngStream& stream);

/// One row per path, header y0..y{n-1}.
void write_paths_csv(std::ostream& out, const Eigen::MatrixXd& paths);

}  // namespace onebit
