#include "onebit/direction_search.hpp"

#include <cmath>
#include <stdexcept>

namespace onebit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_source(const VectorSource& src) {
  if (src.dim < 1 || !src.sample)
    throw std::invalid_argument("VectorSource: dim and sampler required");
}

Eigen::VectorXd random_unit(Eigen::Index dim, RngStream& stream) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = stream.normal();
  const double nrm = v.norm();
  return nrm > 0.0 ? Eigen::VectorXd(v / nrm) : Eigen::VectorXd::Unit(dim, 0);
}

// Objective used by the searches: exact sweep when the projection law is
// known, the amenability surrogate for tagged sources, the empirical sweep
// otherwise. The empirical paths evaluate against one shared sample matrix.
class DirectionObjective {
 public:
  DirectionObjective(const VectorSource& src, Eigen::Index n, RngStream& stream,
                     Eigen::Index min_cell)
      : src_(src), min_cell_(min_cell) {
    if (!src.analytic_projection) samples_ = src.sample(n, stream);
  }

  McEstimate operator()(const Eigen::VectorXd& q) const {
    if (src_.analytic_projection) {
      const AnalyticSource proj = src_.analytic_projection(q);
      return {vardrop_sweep(proj).vardrop, 0.0};
    }
    const Eigen::VectorXd z = samples_ * q;
    if (src_.symmetric && src_.log_concave_projections) {
      const double m = z.array().abs().mean();
      const double var_abs =
          (z.array().abs() - m).square().mean();
      const double se_m = std::sqrt(var_abs / static_cast<double>(z.size()));
      return {m * m, 2.0 * m * se_m};
    }
    const EmpiricalVardrop ev = empirical_vardrop(SampleSet(z), min_cell_);
    return {ev.result.vardrop, ev.std_error};
  }

  const Eigen::MatrixXd& samples() const { return samples_; }

 private:
  const VectorSource& src_;
  Eigen::Index min_cell_;
  Eigen::MatrixXd samples_;
};

HilbertQuantizer lift_scalar(const Eigen::VectorXd& q, const VardropResult& r) {
  return HilbertQuantizer{q, r.quantizer};
}

HilbertQuantizer quantizer_along(const VectorSource& src,
                                 const Eigen::VectorXd& q,
                                 const DirectionObjective& obj,
                                 Eigen::Index min_cell) {
  if (src.analytic_projection)
    return lift_scalar(q, vardrop_sweep(src.analytic_projection(q)));
  const Eigen::VectorXd z = obj.samples() * q;
  return lift_scalar(q, empirical_vardrop(SampleSet(z), min_cell).result);
}

}  // namespace

void check_direction(const VectorSource& src, const Eigen::VectorXd& q) {
  check_source(src);
  if (q.size() != src.dim)
    throw std::invalid_argument("direction: dimension mismatch");
  if (std::abs(q.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("direction: must be unit norm");
}

Eigen::VectorXd canonical_hemisphere(Eigen::VectorXd q) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (std::abs(q[i]) > 1e-14) {
      if (q[i] < 0.0) q = -q;
      break;
    }
  }
  return q;
}

SampleSet project(const VectorSource& src, const Eigen::VectorXd& q,
                  Eigen::Index n, RngStream& stream) {
  check_direction(src, q);
  if (n < 1) throw std::invalid_argument("project: n must be at least 1");
  return SampleSet(src.sample(n, stream) * q);
}

McEstimate vardrop_along(const VectorSource& src, const Eigen::VectorXd& q,
                         Eigen::Index n, RngStream& stream,
                         Eigen::Index min_cell) {
  check_direction(src, q);
  if (src.analytic_projection)
    return {vardrop_sweep(src.analytic_projection(q)).vardrop, 0.0};
  const EmpiricalVardrop ev =
      empirical_vardrop(project(src, q, n, stream), min_cell);
  return {ev.result.vardrop, ev.std_error};
}

McEstimate objective_amen_var(const VectorSource& src, const Eigen::VectorXd& q,
                              Eigen::Index n, RngStream& stream) {
  check_direction(src, q);
  if (!(src.symmetric && src.log_concave_projections))
    throw std::invalid_argument(
        "objective_amen_var: source must be tagged symmetric and log-concave");
  if (src.analytic_projection) {
    const double m = abs_mean(src.analytic_projection(q));
    return {m * m, 0.0};
  }
  const Eigen::VectorXd z = src.sample(n, stream) * q;
  const double m = z.array().abs().mean();
  const double var_abs = (z.array().abs() - m).square().mean();
  const double se_m = std::sqrt(var_abs / static_cast<double>(n));
  return {m * m, 2.0 * m * se_m};
}

SearchResult grid_search_2d(const VectorSource& src, int num_angles,
                            Eigen::Index n, RngStream& stream) {
  check_source(src);
  if (src.dim != 2) throw std::invalid_argument("grid_search_2d: dim must be 2");
  if (num_angles < 8)
    throw std::invalid_argument("grid_search_2d: need at least 8 angles");

  const DirectionObjective objective(src, n, stream, 8);
  SearchResult out;
  out.trace.reserve(static_cast<std::size_t>(num_angles));
  double best = -1.0;
  for (int k = 0; k < num_angles; ++k) {
    const double t = kPi * static_cast<double>(k) / num_angles;
    Eigen::VectorXd q(2);
    q << std::cos(t), std::sin(t);
    q = canonical_hemisphere(std::move(q));
    const McEstimate e = objective(q);
    out.trace.push_back({q, e.value});
    if (e.value > best) {
      best = e.value;
      out.best_direction = q;
    }
  }
  out.vardrop = best;
  out.quantizer = quantizer_along(src, out.best_direction, objective, 8);
  out.status = SearchStatus::completed;
  return out;
}

SearchResult ascent_search(const VectorSource& src, const Eigen::VectorXd& init,
                           int steps, Eigen::Index n, RngStream& stream,
                           const AscentOptions& opts) {
  check_source(src);
  if (src.dim < 2) throw std::invalid_argument("ascent_search: dim must be >= 2");
  Eigen::VectorXd q0 = init;
  const double nrm = q0.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("ascent_search: zero init");
  q0 /= nrm;

  const DirectionObjective objective(src, n, stream, 8);
  const double h = opts.fd_step;

  SearchResult out;
  double best_val = -1.0;
  SearchStatus best_status = SearchStatus::step_limit;

  for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
    Eigen::VectorXd q =
        canonical_hemisphere(r == 0 ? q0 : random_unit(src.dim, stream));
    double fq = objective(q).value;
    out.trace.push_back({q, fq});

    double step = opts.init_step;
    int no_improve = 0;
    SearchStatus status = SearchStatus::step_limit;

    for (int it = 0; it < steps; ++it) {
      // Tangent frame at q: remaining columns of a Householder QR of q.
      const Eigen::MatrixXd frame =
          Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ();
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(src.dim);
      for (Eigen::Index j = 1; j < src.dim; ++j) {
        const Eigen::VectorXd t = frame.col(j);
        const Eigen::VectorXd qp = std::cos(h) * q + std::sin(h) * t;
        const Eigen::VectorXd qm = std::cos(h) * q - std::sin(h) * t;
        const double d =
            (objective(qp).value - objective(qm).value) / (2.0 * h);
        grad += d * t;
      }
      const double gnorm = grad.norm();
      if (!(gnorm > 0.0)) {
        status = SearchStatus::stalled;
        break;
      }
      const Eigen::VectorXd u = grad / gnorm;
      const Eigen::VectorXd cand = canonical_hemisphere(
          (std::cos(step) * q + std::sin(step) * u).normalized());
      const double fc = objective(cand).value;
      out.trace.push_back({cand, fc});
      if (fc > fq) {
        q = cand;
        fq = fc;
        no_improve = 0;
        step = std::min(step * 1.5, opts.init_step);
      } else {
        step *= 0.5;
        ++no_improve;
        if (step < opts.min_step || no_improve >= opts.patience) {
          status = SearchStatus::stalled;
          break;
        }
      }
    }

    if (fq > best_val) {
      best_val = fq;
      out.best_direction = q;
      best_status = status;
    }
  }

  out.vardrop = best_val;
  out.status = best_status;
  out.quantizer = quantizer_along(src, out.best_direction, objective, 8);
  return out;
}

HilbertQuantizer build_quantizer(const VectorSource& src,
                                 const Eigen::VectorXd& q, Eigen::Index n,
                                 RngStream& stream, Eigen::Index min_cell) {
  check_direction(src, q);
  if (src.analytic_projection)
    return lift_scalar(q, vardrop_sweep(src.analytic_projection(q)));
  const EmpiricalVardrop ev =
      empirical_vardrop(project(src, q, n, stream), min_cell);
  return lift_scalar(q, ev.result);
}

McEstimate vector_mse(const VectorSource& src, const HilbertQuantizer& q,
                      Eigen::Index n, RngStream& stream) {
  check_direction(src, q.direction);
  const Eigen::MatrixXd x = src.sample(n, stream);
  const Eigen::VectorXd z = x * q.direction;
  double sum = 0.0, sumsq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = q.scalar.decode(q.scalar.encode(z[i]));
    const double loss = x.row(i).squaredNorm() - 2.0 * r * z[i] + r * r;
    sum += loss;
    sumsq += loss * loss;
  }
  const double m = sum / static_cast<double>(n);
  const double var = std::max(sumsq / static_cast<double>(n) - m * m, 0.0);
  return {m, std::sqrt(var / static_cast<double>(n))};
}

VectorSource iid_source(const AnalyticSource& component, Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("iid_source: dim must be positive");
  VectorSource src;
  src.dim = dim;
  src.symmetric = component.is_symmetric();
  src.log_concave_projections =
      component.is_symmetric() && component.is_log_concave();
  src.sample = [component, dim](Eigen::Index n, RngStream& stream) {
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
      x.col(j) = sample_values(component, n, stream);
    return x;
  };
  if (component.kind() == SourceKind::gaussian) {
    src.analytic_projection = [component](const Eigen::VectorXd& q) {
      const double sigma = std::sqrt(variance(component)) * q.norm();
      return AnalyticSource::gaussian(sigma);
    };
  }
  return src;
}

VectorSource gaussian_source(Eigen::VectorXd stddevs) {
  const Eigen::Index dim = stddevs.size();
  if (dim < 1) throw std::invalid_argument("gaussian_source: empty stddevs");
  for (Eigen::Index i = 0; i < dim; ++i)
    if (!(stddevs[i] > 0.0))
      throw std::invalid_argument("gaussian_source: stddevs must be positive");
  VectorSource src;
  src.dim = dim;
  src.symmetric = true;
  src.log_concave_projections = true;
  src.sample = [stddevs, dim](Eigen::Index n, RngStream& stream) {
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < dim; ++j)
        x(i, j) = stddevs[j] * stream.normal();
    return x;
  };
  src.analytic_projection = [stddevs](const Eigen::VectorXd& q) {
    const double var = (q.array().square() * stddevs.array().square()).sum();
    return AnalyticSource::gaussian(std::sqrt(var));
  };
  return src;
}

VectorSource laplace_pair(double b) {
  return iid_source(AnalyticSource::laplace(b), 2);
}

double laplace_pair_abs_mean(double b, const Eigen::Vector2d& q) {
  if (!(b > 0.0)) throw std::invalid_argument("laplace_pair_abs_mean: b <= 0");
  const double b1 = std::abs(q[0]) * b;
  const double b2 = std::abs(q[1]) * b;
  if (b1 + b2 == 0.0)
    throw std::invalid_argument("laplace_pair_abs_mean: zero direction");
  return (b1 * b1 + b1 * b2 + b2 * b2) / (b1 + b2);
}

VectorSource embedded_scalar_source(const AnalyticSource& component,
                                    Eigen::Index dim, Eigen::Index axis) {
  if (dim < 1 || axis < 0 || axis >= dim)
    throw std::invalid_argument("embedded_scalar_source: bad axis");
  VectorSource src;
  src.dim = dim;
  src.symmetric = component.is_symmetric();
  src.log_concave_projections =
      component.is_symmetric() && component.is_log_concave();
  src.sample = [component, dim, axis](Eigen::Index n, RngStream& stream) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, dim);
    x.col(axis) = sample_values(component, n, stream);
    return x;
  };
  return src;
}

}  // namespace onebit
