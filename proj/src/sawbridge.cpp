#include "onebit/sawbridge.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "onebit/csv.hpp"
#include "onebit/scalar_quant.hpp"
#include "onebit/stats.hpp"

namespace onebit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kVardropDc = 1.0 / 16.0;
constexpr Eigen::Index kChunk = 4096;

// Paths are filled row by row; row-major storage keeps each row contiguous.
using PathBlock =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_unit_interval(double u, const char* what) {
  if (!(u >= 0.0) || !(u < 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1)");
}

// Fills one stationary path row for (u, v) on the precomputed grid.
void fill_stationary(double u, double v, const Eigen::VectorXd& t,
                     double* row) {
  const Eigen::Index n = t.size();
  Eigen::Map<Eigen::ArrayXd> r(row, n);
  r = t.array() + v;
  r -= (r >= 1.0).cast<double>();
  r -= (r >= u).cast<double>();
}

}  // namespace

double grid_inner(const PathGrid& f, const PathGrid& g) {
  if (f.size() != g.size())
    throw std::invalid_argument("grid_inner: size mismatch");
  return f.values.dot(g.values) / static_cast<double>(f.size());
}

double grid_norm2(const PathGrid& f) {
  return f.values.squaredNorm() / static_cast<double>(f.size());
}

double dc(const PathGrid& path) {
  if (path.size() == 0) throw std::invalid_argument("dc: empty path");
  return path.values.mean();
}

Eigen::VectorXd grid_times(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("grid_times: n must be positive");
  return Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) /
         static_cast<double>(n);
}

PathGrid sample_nonstationary(double u, Eigen::Index n) {
  check_unit_interval(u, "drop location u");
  const Eigen::VectorXd t = grid_times(n);
  PathGrid p{Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i)
    p.values[i] = t[i] - (t[i] >= u ? 1.0 : 0.0);
  return p;
}

PathGrid sample_stationary(const SawbridgeDraw& draw, Eigen::Index n) {
  check_unit_interval(draw.u, "drop location u");
  check_unit_interval(draw.v, "phase v");
  const Eigen::VectorXd t = grid_times(n);
  PathGrid p{Eigen::VectorXd(n)};
  fill_stationary(draw.u, draw.v, t, p.values.data());
  return p;
}

SawbridgeDraw sample_draw(RngStream& stream) {
  return SawbridgeDraw{stream.uniform01(), stream.uniform01()};
}

double autocorr(double s, double t) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("autocorr: arguments must lie in [0, 1]");
  const double d = std::abs(s - t);
  return 0.5 * d * d - 0.5 * d + 1.0 / 6.0;
}

Eigensystem discrete_eigensystem(Eigen::Index n, Eigen::Index k_top) {
  if (n < 64) throw std::invalid_argument("discrete_eigs: n must be >= 64");
  if (k_top < 1 || k_top > n)
    throw std::invalid_argument("discrete_eigs: k_top out of range");
  const Eigen::VectorXd t = grid_times(n);
  Eigen::MatrixXd kernel(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = autocorr(t[i], t[j]) / static_cast<double>(n);
      kernel(i, j) = v;
      kernel(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("discrete_eigs: eigensolver failed");
  Eigensystem out;
  out.eigenvalues = solver.eigenvalues().tail(k_top).reverse();
  out.eigenvectors = solver.eigenvectors().rightCols(k_top).rowwise().reverse();
  return out;
}

Eigen::VectorXd discrete_eigs(Eigen::Index n, Eigen::Index k_top) {
  return discrete_eigensystem(n, k_top).eigenvalues;
}

KLBasis make_kl_basis(Eigen::Index n, Eigen::Index k_max) {
  if (n < 4 || k_max < 0 || 2 * k_max + 1 > n / 2)
    throw std::invalid_argument("make_kl_basis: k_max too large for grid");
  const Eigen::VectorXd t = grid_times(n);
  const Eigen::Index m = 2 * k_max + 1;
  KLBasis basis;
  basis.k_max = k_max;
  basis.functions.resize(n, m);
  basis.eigenvalues.resize(m);
  basis.functions.col(0).setOnes();
  basis.eigenvalues[0] = 1.0 / 12.0;
  const double sqrt2 = std::sqrt(2.0);
  for (Eigen::Index k = 1; k <= k_max; ++k) {
    const Eigen::ArrayXd phase = 2.0 * kPi * static_cast<double>(k) * t.array();
    basis.functions.col(2 * k - 1) = sqrt2 * phase.sin();
    basis.functions.col(2 * k) = sqrt2 * phase.cos();
    const double lambda =
        1.0 / (4.0 * kPi * kPi * static_cast<double>(k) * static_cast<double>(k));
    basis.eigenvalues[2 * k - 1] = lambda;
    basis.eigenvalues[2 * k] = lambda;
  }
  return basis;
}

Eigen::VectorXd kl_coeffs(const PathGrid& path, const KLBasis& basis) {
  if (path.size() != basis.functions.rows())
    throw std::invalid_argument("kl_coeffs: grid size mismatch");
  return basis.functions.transpose() * path.values /
         static_cast<double>(path.size());
}

QuantizedPath optimal_quantize(const PathGrid& path) {
  const int bit = dc(path) > 0.0 ? 1 : 0;
  const double r = bit ? 0.25 : -0.25;
  return QuantizedPath{bit,
                       PathGrid{Eigen::VectorXd::Constant(path.size(), r)}};
}

McEstimate mc_mse(Eigen::Index num_paths, Eigen::Index n, RngStream& stream,
                  double recon_magnitude) {
  if (num_paths < 1000)
    throw std::invalid_argument("mc_mse: need at least 1000 paths");
  const Eigen::VectorXd t = grid_times(n);
  Eigen::VectorXd row(n);
  double sum = 0.0, sumsq = 0.0;
  for (Eigen::Index p = 0; p < num_paths; ++p) {
    const SawbridgeDraw draw = sample_draw(stream);
    fill_stationary(draw.u, draw.v, t, row.data());
    const double energy = row.squaredNorm() / static_cast<double>(n);
    const double m = row.mean();
    const double r = m > 0.0 ? recon_magnitude : -recon_magnitude;
    const double loss = energy - 2.0 * r * m + r * r;
    sum += loss;
    sumsq += loss * loss;
  }
  const double np = static_cast<double>(num_paths);
  const double mean_loss = sum / np;
  const double var_loss = std::max(sumsq / np - mean_loss * mean_loss, 0.0);
  return {mean_loss, std::sqrt(var_loss / np)};
}

DirectionSplit direction_split(const PathGrid& q) {
  const double norm2 = grid_norm2(q);
  if (std::abs(norm2 - 1.0) > 1e-10)
    throw std::invalid_argument("direction_split: q must be unit norm");
  const double m = q.values.mean();
  const double theta = m * m;
  const int sign = m >= 0.0 ? 1 : -1;
  if (theta >= 1.0 - 1e-14)
    return DirectionSplit{1.0, sign,
                          PathGrid{Eigen::VectorXd::Zero(q.size())}};
  PathGrid g{(q.values.array() - m).matrix() / std::sqrt(1.0 - theta)};
  return DirectionSplit{theta, sign, std::move(g)};
}

ProjectionSplit split_projection(const DirectionSplit& split, const PathGrid& y) {
  const double z_dc = static_cast<double>(split.dc_sign) * dc(y);
  const double z_ac =
      split.theta < 1.0 ? grid_inner(split.ac_direction, y) : 0.0;
  return ProjectionSplit{split.theta, z_dc, z_ac};
}

double reconstruct(const ProjectionSplit& p) {
  return std::sqrt(p.theta) * p.z_dc + std::sqrt(1.0 - p.theta) * p.z_ac;
}

std::vector<IndependenceReport> verify_dc_ac_independence_many(
    const std::vector<PathGrid>& qs, Eigen::Index num_paths, RngStream& stream) {
  if (qs.empty()) return {};
  if (num_paths < 2)
    throw std::invalid_argument("verify_dc_ac_independence: need at least 2 paths");
  const Eigen::Index n = qs.front().size();
  const auto d = static_cast<Eigen::Index>(qs.size());

  std::vector<DirectionSplit> splits;
  splits.reserve(qs.size());
  Eigen::MatrixXd columns(n, 2 * d);  // q_j then g_j per direction
  for (Eigen::Index j = 0; j < d; ++j) {
    const PathGrid& q = qs[static_cast<std::size_t>(j)];
    if (q.size() != n)
      throw std::invalid_argument("verify_dc_ac_independence: mixed grid sizes");
    DirectionSplit split = direction_split(q);
    if (!(split.theta > 0.0 && split.theta < 1.0))
      throw std::invalid_argument("verify_dc_ac_independence: need 0 < theta < 1");
    columns.col(2 * j) = q.values;
    columns.col(2 * j + 1) = split.ac_direction.values;
    splits.push_back(std::move(split));
  }

  const Eigen::VectorXd t = grid_times(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd proj(num_paths, 2 * d);
  Eigen::VectorXd path_dc(num_paths);
  PathBlock block(kChunk, n);
  for (Eigen::Index done = 0; done < num_paths;) {
    const Eigen::Index count = std::min(kChunk, num_paths - done);
    for (Eigen::Index p = 0; p < count; ++p) {
      const SawbridgeDraw draw = sample_draw(stream);
      fill_stationary(draw.u, draw.v, t, block.row(p).data());
    }
    const auto rows = block.topRows(count);
    proj.middleRows(done, count) = rows * columns * inv_n;
    path_dc.segment(done, count) = rows.rowwise().mean();
    done += count;
  }

  std::vector<IndependenceReport> reports;
  reports.reserve(qs.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    const DirectionSplit& split = splits[static_cast<std::size_t>(j)];
    const Eigen::VectorXd z = proj.col(2 * j);
    const Eigen::VectorXd z_ac = proj.col(2 * j + 1);
    const Eigen::VectorXd z_dc =
        path_dc * static_cast<double>(split.dc_sign);

    IndependenceReport rep;
    rep.theta = split.theta;
    rep.num_paths = num_paths;
    rep.corr = pearson_corr(z_dc, z_ac);
    rep.corr_threshold = 3.0 / std::sqrt(static_cast<double>(num_paths));
    rep.corr_pass = std::abs(rep.corr) < rep.corr_threshold;

    const auto [stat, p_value] = chi2_independence(z_dc, z_ac, 8);
    rep.chi2 = stat;
    rep.p_value = p_value;
    rep.dof = 49;
    rep.chi2_pass = p_value > 0.001;

    const double var_dc = variance(z_dc);
    const double var_ac = variance(z_ac);
    rep.var_z = variance(z);
    rep.var_split_sum = split.theta * var_dc + (1.0 - split.theta) * var_ac;
    const double cross = 2.0 * std::sqrt(split.theta * (1.0 - split.theta));
    rep.additivity_threshold = 3.0 * cross * std::sqrt(var_dc * var_ac) /
                               std::sqrt(static_cast<double>(num_paths));
    rep.additivity_pass =
        std::abs(rep.var_z - rep.var_split_sum) < rep.additivity_threshold;
    reports.push_back(std::move(rep));
  }
  return reports;
}

IndependenceReport verify_dc_ac_independence(const PathGrid& q,
                                             Eigen::Index num_paths,
                                             RngStream& stream) {
  return verify_dc_ac_independence_many({q}, num_paths, stream).front();
}

PathGrid random_kl_direction(const KLBasis& basis, double theta, int dc_sign,
                             RngStream& stream) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("random_kl_direction: theta out of range");
  const Eigen::Index m = basis.functions.cols();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  c[0] = static_cast<double>(dc_sign) * std::sqrt(theta);
  if (theta < 1.0) {
    Eigen::VectorXd ac(m - 1);
    for (Eigen::Index i = 0; i < m - 1; ++i) ac[i] = stream.normal();
    const double nrm = ac.norm();
    if (nrm > 0.0) c.tail(m - 1) = ac * (std::sqrt(1.0 - theta) / nrm);
  }
  PathGrid q{basis.functions * c};
  q.values /= std::sqrt(grid_norm2(q));
  return q;
}

ThetaRegimesReport verify_theta_regimes(Eigen::Index num_directions,
                                        Eigen::Index num_paths,
                                        RngStream& stream, Eigen::Index n,
                                        Eigen::Index k_max) {
  if (num_directions < 2)
    throw std::invalid_argument("verify_theta_regimes: need >= 2 directions");
  const KLBasis basis = make_kl_basis(n, k_max);
  const Eigen::VectorXd t = grid_times(n);
  const double inv_n = 1.0 / static_cast<double>(n);

  // Stratified thetas over (0, 1), plus the pure-DC direction theta = 1.
  Eigen::MatrixXd directions(n, num_directions);
  std::vector<DirectionSplit> splits;
  splits.reserve(static_cast<std::size_t>(num_directions));
  for (Eigen::Index i = 0; i < num_directions; ++i) {
    const bool last = (i == num_directions - 1);
    const double theta =
        last ? 1.0
             : (static_cast<double>(i) + 0.5) / static_cast<double>(num_directions);
    const int sign = (i % 2 == 0) ? 1 : -1;
    const PathGrid q = random_kl_direction(basis, theta, sign, stream);
    directions.col(i) = q.values;
    splits.push_back(direction_split(q));
  }

  // One shared path pool; projections by blocked matrix products.
  Eigen::MatrixXd z(num_paths, num_directions);
  Eigen::VectorXd path_dc(num_paths);
  PathBlock block(kChunk, n);
  for (Eigen::Index done = 0; done < num_paths;) {
    const Eigen::Index count = std::min(kChunk, num_paths - done);
    for (Eigen::Index p = 0; p < count; ++p) {
      const SawbridgeDraw draw = sample_draw(stream);
      fill_stationary(draw.u, draw.v, t, block.row(p).data());
    }
    const auto rows = block.topRows(count);
    z.middleRows(done, count) = rows * directions * inv_n;
    path_dc.segment(done, count) = rows.rowwise().mean();
    done += count;
  }

  ThetaRegimesReport rep;
  rep.directions.reserve(static_cast<std::size_t>(num_directions));
  for (Eigen::Index i = 0; i < num_directions; ++i) {
    const DirectionSplit& split = splits[static_cast<std::size_t>(i)];
    DirectionCheck chk;
    chk.theta = split.theta;
    const Eigen::VectorXd zi = z.col(i);
    chk.var_z = variance(zi);

    const EmpiricalVardrop ev = empirical_vardrop(SampleSet(zi), 8);
    chk.vardrop = ev.result.vardrop;
    chk.vardrop_se = ev.std_error;
    chk.vardrop_pass = chk.vardrop <= kVardropDc + 3.0 * chk.vardrop_se;
    if (!chk.vardrop_pass) ++rep.vardrop_violations;

    if (split.theta <= 5.0 / 8.0) {
      chk.var_pass = chk.var_z < kVardropDc;
      if (!chk.var_pass) ++rep.var_violations;
      chk.two_atom_bound = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double a = 0.5 * std::sqrt(split.theta);
      const double b = std::sqrt((1.0 - split.theta) / 12.0);
      // Oriented empirical AC support [-b_emp, c_emp] with c <= b.
      const double sqrt_theta = std::sqrt(split.theta);
      double lo = 0.0, hi = 0.0;
      for (Eigen::Index p = 0; p < num_paths; ++p) {
        const double ac = zi[p] - sqrt_theta *
                                      static_cast<double>(split.dc_sign) *
                                      path_dc[p];
        lo = std::min(lo, ac);
        hi = std::max(hi, ac);
      }
      const double c_oriented = std::min(-lo, hi);
      chk.ac_support_flagged = c_oriented > b + 1e-12;
      if (chk.ac_support_flagged) ++rep.flagged;
      chk.two_atom_bound = std::pow((a * a + b * c_oriented) / (2.0 * a), 2);
      chk.bound_pass = chk.two_atom_bound <= kVardropDc + 1e-12;
      if (!chk.bound_pass) ++rep.bound_violations;
    }
    rep.directions.push_back(std::move(chk));
  }
  return rep;
}

void write_paths_csv(std::ostream& out, const Eigen::MatrixXd& paths) {
  const Eigen::Index n = paths.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j) out << ',';
    out << 'y' << j;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < paths.rows(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(paths(i, j));
    }
    out << '\n';
  }
}

}  // namespace onebit
