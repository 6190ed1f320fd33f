#include "onebit/sources.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace onebit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMassTol = 1e-12;
constexpr double kTabulatedTol = 1e-6;

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

// (u2^n - u1^n) / n
double power_diff(double u1, double u2, int n) {
  return (std::pow(u2, n) - std::pow(u1, n)) / static_cast<double>(n);
}

}  // namespace

SampleSet::SampleSet(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0)
    throw std::invalid_argument("SampleSet: empty sample");
  std::sort(values_.begin(), values_.end());
}

double SampleSet::mean() const { return values_.mean(); }

double SampleSet::variance() const {
  const double m = values_.mean();
  return (values_.array() - m).square().mean();
}

AnalyticSource AnalyticSource::uniform(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("uniform: half_width must be positive");
  return AnalyticSource(detail::UniformParams{half_width});
}

AnalyticSource AnalyticSource::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("gaussian: sigma must be positive");
  return AnalyticSource(detail::GaussianParams{sigma});
}

AnalyticSource AnalyticSource::laplace(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("laplace: scale must be positive");
  return AnalyticSource(detail::LaplaceParams{scale});
}

AnalyticSource AnalyticSource::triangular(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("triangular: half_width must be positive");
  return AnalyticSource(detail::TriangularParams{half_width});
}

AnalyticSource AnalyticSource::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.x < r.x; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!(a.mass >= 0.0) || !std::isfinite(a.x))
      throw std::invalid_argument("discrete: invalid atom");
    if (!merged.empty() && merged.back().x == a.x)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }
  double total = 0.0, m1 = 0.0, m2 = 0.0;
  for (const Atom& a : merged) {
    total += a.mass;
    m1 += a.mass * a.x;
    m2 += a.mass * a.x * a.x;
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw std::invalid_argument("discrete: total mass must be 1");
  if (std::abs(m1) > kMassTol)
    throw std::invalid_argument("discrete: mean must be 0");
  if (!(m2 > 0.0))
    throw std::invalid_argument("discrete: second moment must be positive");
  return AnalyticSource(detail::DiscreteParams{std::move(merged)});
}

AnalyticSource AnalyticSource::tabulated(double x0, double dx,
                                         Eigen::VectorXd pdf) {
  const Eigen::Index m = pdf.size();
  if (m < 3) throw std::invalid_argument("tabulated: need at least 3 nodes");
  if (!(dx > 0.0)) throw std::invalid_argument("tabulated: dx must be positive");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(pdf[i] >= -1e-15) || !std::isfinite(pdf[i]))
      throw std::invalid_argument("tabulated: pdf must be nonnegative");
    pdf[i] = std::max(pdf[i], 0.0);
  }
  double mass = 0.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i)
    mass += 0.5 * dx * (pdf[i] + pdf[i + 1]);
  if (std::abs(mass - 1.0) > kTabulatedTol)
    throw std::invalid_argument("tabulated: density must integrate to 1");
  pdf /= mass;

  detail::TabulatedParams p;
  p.x0 = x0;
  p.dx = dx;
  p.pdf = std::move(pdf);
  p.cum_mass.resize(m - 1);
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    acc += 0.5 * dx * (p.pdf[i] + p.pdf[i + 1]);
    p.cum_mass[i] = acc;
  }
  p.cum_mass[m - 2] = 1.0;

  AnalyticSource src(std::move(p));
  const double half_range = 0.5 * dx * static_cast<double>(m - 1);
  const double mu = tail_partial_mean(src, x0 - 1.0);  // full-range mean
  if (std::abs(mu) > kTabulatedTol * std::max(1.0, half_range))
    throw std::invalid_argument("tabulated: mean must be 0");
  if (!(variance(src) > 0.0))
    throw std::invalid_argument("tabulated: second moment must be positive");
  return src;
}

SourceKind AnalyticSource::kind() const {
  return static_cast<SourceKind>(params_.index());
}

const std::vector<Atom>& AnalyticSource::atoms() const {
  return std::get<detail::DiscreteParams>(params_).atoms;
}

bool AnalyticSource::is_symmetric() const {
  struct V {
    bool operator()(const detail::UniformParams&) const { return true; }
    bool operator()(const detail::GaussianParams&) const { return true; }
    bool operator()(const detail::LaplaceParams&) const { return true; }
    bool operator()(const detail::TriangularParams&) const { return true; }
    bool operator()(const detail::DiscreteParams& p) const {
      const auto& a = p.atoms;
      const std::size_t m = a.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Atom& lo = a[i];
        const Atom& hi = a[m - 1 - i];
        if (std::abs(lo.x + hi.x) > 1e-12 || std::abs(lo.mass - hi.mass) > 1e-12)
          return false;
      }
      return true;
    }
    bool operator()(const detail::TabulatedParams& p) const {
      const Eigen::Index m = p.pdf.size();
      const double hi = p.x0 + p.dx * static_cast<double>(m - 1);
      if (std::abs(p.x0 + hi) > 1e-9 * p.dx) return false;
      for (Eigen::Index i = 0; i < m; ++i)
        if (std::abs(p.pdf[i] - p.pdf[m - 1 - i]) > 1e-9) return false;
      return true;
    }
  };
  return std::visit(V{}, params_);
}

bool AnalyticSource::is_log_concave() const {
  switch (kind()) {
    case SourceKind::uniform:
    case SourceKind::gaussian:
    case SourceKind::laplace:
    case SourceKind::triangular:
      return true;
    default:
      return false;
  }
}

namespace {

// Tabulated-density cell integrals of f, x f, x^2 f over [alpha, beta]
// within cell k; the density is linear on the cell.
struct TabCell {
  double xk, fa, s;  // f(x) = fa + s * (x - xk)

  double prob(double alpha, double beta) const {
    const double u1 = alpha - xk, u2 = beta - xk;
    return fa * (u2 - u1) + 0.5 * s * (u2 * u2 - u1 * u1);
  }
  double moment1(double alpha, double beta) const {
    const double u1 = alpha - xk, u2 = beta - xk;
    return xk * fa * power_diff(u1, u2, 1) +
           (fa + xk * s) * power_diff(u1, u2, 2) + s * power_diff(u1, u2, 3);
  }
  double moment2(double alpha, double beta) const {
    const double u1 = alpha - xk, u2 = beta - xk;
    return xk * xk * fa * power_diff(u1, u2, 1) +
           (2.0 * xk * fa + xk * xk * s) * power_diff(u1, u2, 2) +
           (fa + 2.0 * xk * s) * power_diff(u1, u2, 3) +
           s * power_diff(u1, u2, 4);
  }
};

TabCell tab_cell(const detail::TabulatedParams& p, Eigen::Index k) {
  const double xk = p.x0 + p.dx * static_cast<double>(k);
  return TabCell{xk, p.pdf[k], (p.pdf[k + 1] - p.pdf[k]) / p.dx};
}

struct VarianceVisitor {
  double operator()(const detail::UniformParams& p) const {
    return p.a * p.a / 3.0;
  }
  double operator()(const detail::GaussianParams& p) const {
    return p.sigma * p.sigma;
  }
  double operator()(const detail::LaplaceParams& p) const {
    return 2.0 * p.b * p.b;
  }
  double operator()(const detail::TriangularParams& p) const {
    return p.a * p.a / 6.0;
  }
  double operator()(const detail::DiscreteParams& p) const {
    double m2 = 0.0;
    for (const Atom& a : p.atoms) m2 += a.mass * a.x * a.x;
    return m2;
  }
  double operator()(const detail::TabulatedParams& p) const {
    double m2 = 0.0;
    for (Eigen::Index k = 0; k + 1 < p.pdf.size(); ++k) {
      const TabCell c = tab_cell(p, k);
      m2 += c.moment2(c.xk, c.xk + p.dx);
    }
    return m2;
  }
};

struct AbsMeanVisitor {
  double operator()(const detail::UniformParams& p) const { return 0.5 * p.a; }
  double operator()(const detail::GaussianParams& p) const {
    return p.sigma * std::sqrt(2.0 / kPi);
  }
  double operator()(const detail::LaplaceParams& p) const { return p.b; }
  double operator()(const detail::TriangularParams& p) const { return p.a / 3.0; }
  double operator()(const detail::DiscreteParams& p) const {
    double m = 0.0;
    for (const Atom& a : p.atoms) m += a.mass * std::abs(a.x);
    return m;
  }
  double operator()(const detail::TabulatedParams& p) const {
    double m = 0.0;
    for (Eigen::Index k = 0; k + 1 < p.pdf.size(); ++k) {
      const TabCell c = tab_cell(p, k);
      const double lo = c.xk, hi = c.xk + p.dx;
      if (hi <= 0.0)
        m -= c.moment1(lo, hi);
      else if (lo >= 0.0)
        m += c.moment1(lo, hi);
      else
        m += c.moment1(0.0, hi) - c.moment1(lo, 0.0);
    }
    return m;
  }
};

struct TailProbVisitor {
  double w;
  double operator()(const detail::UniformParams& p) const {
    if (w <= -p.a) return 1.0;
    if (w >= p.a) return 0.0;
    return (p.a - w) / (2.0 * p.a);
  }
  double operator()(const detail::GaussianParams& p) const {
    return 0.5 * std::erfc(w / (p.sigma * std::sqrt(2.0)));
  }
  double operator()(const detail::LaplaceParams& p) const {
    if (w >= 0.0) return 0.5 * std::exp(-w / p.b);
    return 1.0 - 0.5 * std::exp(w / p.b);
  }
  double operator()(const detail::TriangularParams& p) const {
    if (w <= -p.a) return 1.0;
    if (w >= p.a) return 0.0;
    const double d = p.a - std::abs(w);
    const double half = 0.5 * d * d / (p.a * p.a);
    return w >= 0.0 ? half : 1.0 - half;
  }
  double operator()(const detail::DiscreteParams& p) const {
    double t = 0.0;
    for (auto it = p.atoms.rbegin(); it != p.atoms.rend() && it->x >= w; ++it)
      t += it->mass;
    return t;
  }
  double operator()(const detail::TabulatedParams& p) const {
    const Eigen::Index m = p.pdf.size();
    const double hi = p.x0 + p.dx * static_cast<double>(m - 1);
    if (w <= p.x0) return 1.0;
    if (w >= hi) return 0.0;
    auto k = static_cast<Eigen::Index>((w - p.x0) / p.dx);
    k = std::min(k, m - 2);
    const TabCell c = tab_cell(p, k);
    const double above_cells = (k + 1 < m - 1) ? 1.0 - p.cum_mass[k] : 0.0;
    return c.prob(w, c.xk + p.dx) + above_cells;
  }
};

struct TailPartialMeanVisitor {
  double w;
  double operator()(const detail::UniformParams& p) const {
    if (w <= -p.a || w >= p.a) return 0.0;
    return (p.a * p.a - w * w) / (4.0 * p.a);
  }
  double operator()(const detail::GaussianParams& p) const {
    return p.sigma * std_normal_pdf(w / p.sigma);
  }
  double operator()(const detail::LaplaceParams& p) const {
    const double aw = std::abs(w);
    return 0.5 * std::exp(-aw / p.b) * (aw + p.b);
  }
  double operator()(const detail::TriangularParams& p) const {
    const double aw = std::abs(w);
    if (aw >= p.a) return 0.0;
    return (p.a * p.a * p.a / 6.0 - p.a * aw * aw / 2.0 + aw * aw * aw / 3.0) /
           (p.a * p.a);
  }
  double operator()(const detail::DiscreteParams& p) const {
    double t = 0.0;
    for (auto it = p.atoms.rbegin(); it != p.atoms.rend() && it->x >= w; ++it)
      t += it->mass * it->x;
    return t;
  }
  double operator()(const detail::TabulatedParams& p) const {
    const Eigen::Index m = p.pdf.size();
    const double hi = p.x0 + p.dx * static_cast<double>(m - 1);
    if (w >= hi) return 0.0;
    double start = w;
    Eigen::Index k0 = 0;
    if (w <= p.x0) {
      start = p.x0;
    } else {
      k0 = std::min(static_cast<Eigen::Index>((w - p.x0) / p.dx), m - 2);
    }
    double t = 0.0;
    for (Eigen::Index k = k0; k + 1 < m; ++k) {
      const TabCell c = tab_cell(p, k);
      const double lo = (k == k0) ? start : c.xk;
      t += c.moment1(lo, c.xk + p.dx);
    }
    return t;
  }
};

struct MedianVisitor {
  double operator()(const detail::UniformParams&) const { return 0.0; }
  double operator()(const detail::GaussianParams&) const { return 0.0; }
  double operator()(const detail::LaplaceParams&) const { return 0.0; }
  double operator()(const detail::TriangularParams&) const { return 0.0; }
  double operator()(const detail::DiscreteParams& p) const {
    double cum = 0.0;
    for (const Atom& a : p.atoms) {
      cum += a.mass;
      if (cum >= 0.5 - 1e-15) return a.x;
    }
    return p.atoms.back().x;
  }
  double operator()(const detail::TabulatedParams& p) const {
    // Invert the piecewise-quadratic cdf within the cell that crosses 1/2.
    double below = 0.0;
    for (Eigen::Index k = 0; k + 1 < p.pdf.size(); ++k) {
      const double cell = (k == 0 ? p.cum_mass[0]
                                  : p.cum_mass[k] - p.cum_mass[k - 1]);
      if (below + cell >= 0.5) {
        const TabCell c = tab_cell(p, k);
        const double r = 0.5 - below;
        const double disc = std::sqrt(std::max(c.fa * c.fa + 2.0 * c.s * r, 0.0));
        const double y = (c.fa + disc > 0.0) ? 2.0 * r / (c.fa + disc) : 0.0;
        return c.xk + std::min(y, p.dx);
      }
      below += cell;
    }
    return p.x0;
  }
};

struct SampleVisitor {
  Eigen::Index n;
  RngStream& stream;

  Eigen::VectorXd operator()(const detail::UniformParams& p) const {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v[i] = p.a * (2.0 * stream.uniform01() - 1.0);
    return v;
  }
  Eigen::VectorXd operator()(const detail::GaussianParams& p) const {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = p.sigma * stream.normal();
    return v;
  }
  Eigen::VectorXd operator()(const detail::LaplaceParams& p) const {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = stream.uniform01();
      v[i] = u < 0.5 ? p.b * std::log(2.0 * u) : -p.b * std::log(2.0 * (1.0 - u));
    }
    return v;
  }
  Eigen::VectorXd operator()(const detail::TriangularParams& p) const {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v[i] = p.a * (stream.uniform01() + stream.uniform01() - 1.0);
    return v;
  }
  Eigen::VectorXd operator()(const detail::DiscreteParams& p) const {
    std::vector<double> cum(p.atoms.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < p.atoms.size(); ++j) {
      acc += p.atoms[j].mass;
      cum[j] = acc;
    }
    cum.back() = 1.0;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = stream.uniform01();
      const auto j = static_cast<std::size_t>(
          std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      v[i] = p.atoms[std::min(j, p.atoms.size() - 1)].x;
    }
    return v;
  }
  Eigen::VectorXd operator()(const detail::TabulatedParams& p) const {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = stream.uniform01();
      const auto k = static_cast<Eigen::Index>(
          std::lower_bound(p.cum_mass.begin(), p.cum_mass.end(), u) -
          p.cum_mass.begin());
      const double below = (k == 0) ? 0.0 : p.cum_mass[k - 1];
      const double r = u - below;
      const TabCell c = tab_cell(p, k);
      const double disc = std::sqrt(std::max(c.fa * c.fa + 2.0 * c.s * r, 0.0));
      const double y = (c.fa + disc > 0.0) ? 2.0 * r / (c.fa + disc) : 0.0;
      v[i] = c.xk + std::min(y, p.dx);
    }
    return v;
  }
};

struct ScaleVisitor {
  double a;  // nonzero
  detail::SourceParams operator()(const detail::UniformParams& p) const {
    return detail::UniformParams{std::abs(a) * p.a};
  }
  detail::SourceParams operator()(const detail::GaussianParams& p) const {
    return detail::GaussianParams{std::abs(a) * p.sigma};
  }
  detail::SourceParams operator()(const detail::LaplaceParams& p) const {
    return detail::LaplaceParams{std::abs(a) * p.b};
  }
  detail::SourceParams operator()(const detail::TriangularParams& p) const {
    return detail::TriangularParams{std::abs(a) * p.a};
  }
  detail::SourceParams operator()(const detail::DiscreteParams& p) const {
    std::vector<Atom> atoms;
    atoms.reserve(p.atoms.size());
    for (const Atom& at : p.atoms) atoms.push_back({a * at.x, at.mass});
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& l, const Atom& r) { return l.x < r.x; });
    return detail::DiscreteParams{std::move(atoms)};
  }
  detail::SourceParams operator()(const detail::TabulatedParams& p) const {
    const Eigen::Index m = p.pdf.size();
    const double mag = std::abs(a);
    detail::TabulatedParams q;
    q.dx = mag * p.dx;
    q.pdf = p.pdf / mag;
    if (a < 0.0) q.pdf.reverseInPlace();
    const double hi = p.x0 + p.dx * static_cast<double>(m - 1);
    q.x0 = (a > 0.0) ? a * p.x0 : a * hi;
    q.cum_mass.resize(m - 1);
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      acc += 0.5 * q.dx * (q.pdf[i] + q.pdf[i + 1]);
      q.cum_mass[i] = acc;
    }
    q.cum_mass[m - 2] = 1.0;
    return q;
  }
};

}  // namespace

double variance(const AnalyticSource& src) {
  return std::visit(VarianceVisitor{}, src.params());
}

double abs_mean(const AnalyticSource& src) {
  return std::visit(AbsMeanVisitor{}, src.params());
}

double tail_prob(const AnalyticSource& src, double w) {
  return std::visit(TailProbVisitor{w}, src.params());
}

double tail_partial_mean(const AnalyticSource& src, double w) {
  return std::visit(TailPartialMeanVisitor{w}, src.params());
}

double median(const AnalyticSource& src) {
  return std::visit(MedianVisitor{}, src.params());
}

Eigen::VectorXd sample_values(const AnalyticSource& src, Eigen::Index n,
                              RngStream& stream) {
  if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
  return std::visit(SampleVisitor{n, stream}, src.params());
}

SampleSet sample(const AnalyticSource& src, Eigen::Index n, RngStream& stream) {
  return SampleSet(sample_values(src, n, stream));
}

AnalyticSource scale(const AnalyticSource& src, double a) {
  if (a == 0.0 || !std::isfinite(a))
    throw std::invalid_argument("scale: factor must be nonzero");
  return AnalyticSource(std::visit(ScaleVisitor{a}, src.params()));
}

AnalyticSource x_eps_delta(double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("x_eps_delta: need 0 < eps < 1, 0 < delta < 0.5");
  return AnalyticSource::discrete({{-1.0, delta},
                                   {-eps, 0.5 - delta},
                                   {eps, 0.5 - delta},
                                   {1.0, delta}});
}

AnalyticSource load_tabulated_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("tabulated csv: empty file");
  std::vector<double> xs, ps;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string fx, fp;
    if (!std::getline(row, fx, ',') || !std::getline(row, fp))
      throw std::invalid_argument("tabulated csv: malformed line " +
                                  std::to_string(lineno));
    try {
      xs.push_back(std::stod(fx));
      ps.push_back(std::stod(fp));
    } catch (const std::exception&) {
      throw std::invalid_argument("tabulated csv: malformed line " +
                                  std::to_string(lineno));
    }
  }
  if (xs.size() < 3)
    throw std::invalid_argument("tabulated csv: need at least 3 rows");
  const double dx = xs[1] - xs[0];
  if (!(dx > 0.0)) throw std::invalid_argument("tabulated csv: grid not increasing");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
      throw std::invalid_argument("tabulated csv: grid not uniform");
  }
  Eigen::VectorXd pdf =
      Eigen::Map<const Eigen::VectorXd>(ps.data(), static_cast<Eigen::Index>(ps.size()));
  return AnalyticSource::tabulated(xs[0], dx, std::move(pdf));
}

}  // namespace onebit
