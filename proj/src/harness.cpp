#include "onebit/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "onebit/csv.hpp"
#include "onebit/direction_search.hpp"
#include "onebit/sawbridge.hpp"
#include "onebit/stats.hpp"

#ifndef ONEBIT_VERSION
#define ONEBIT_VERSION "0.1.0"
#endif

namespace onebit {

namespace {

constexpr double kPi = 3.14159265358979323846;

using json = nlohmann::ordered_json;

std::string format_name(ExperimentConfig::Format f) {
  return f == ExperimentConfig::Format::csv ? "csv" : "json";
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["grid_n"] = c.grid_n;
  j["out_path"] = c.out_path;
  j["format"] = format_name(c.format);
  j["angles"] = c.angles;
  j["num_paths"] = c.num_paths;
  j["k_max"] = c.k_max;
  j["min_cell"] = c.min_cell;
  j["eps"] = c.eps;
  j["delta"] = c.delta;
  j["num_directions"] = c.num_directions;
  j["num_runs"] = c.num_runs;
  j["input_path"] = c.input_path;
  j["compare_path"] = c.compare_path;
  j["export_paths"] = c.export_paths;
  j["export_count"] = c.export_count;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output path: " + path);
  out << content;
  if (!out) throw UsageError("failed writing output path: " + path);
}

std::string default_out(const ExperimentConfig& c, const std::string& command) {
  if (!c.out_path.empty()) return c.out_path;
  return "onebit_" + command + "." + format_name(c.format);
}

void add_check(Report& rep, const std::string& statistic, double value,
               double threshold, bool pass) {
  rep.checks.push_back({statistic, value, threshold, pass});
  rep.all_pass = rep.all_pass && pass;
}

json checks_to_json(const std::vector<CheckRecord>& checks) {
  json arr = json::array();
  for (const CheckRecord& c : checks) {
    json j;
    j["statistic"] = c.statistic;
    j["value"] = c.value;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string checks_to_csv(const std::vector<CheckRecord>& checks) {
  std::ostringstream out;
  out << "statistic,value,threshold,pass\n";
  for (const CheckRecord& c : checks)
    out << c.statistic << ',' << format_double(c.value) << ','
        << format_double(c.threshold) << ',' << (c.pass ? 1 : 0) << '\n';
  return out.str();
}

// Writes the command's primary artifact: the given CSV when format=csv, the
// full JSON report otherwise.
void emit(Report& rep, const ExperimentConfig& config, const std::string& csv) {
  rep.out_path = default_out(config, rep.command);
  if (config.format == ExperimentConfig::Format::csv)
    write_text_file(rep.out_path, csv);
  else
    write_text_file(rep.out_path, rep.to_json(config, true).dump(2) + "\n");
}

double direction_angle_deg(const Eigen::VectorXd& q) {
  double a = std::atan2(q[1], q[0]) * 180.0 / kPi;
  while (a < 0.0) a += 180.0;
  while (a >= 180.0) a -= 180.0;
  return a;
}

// Distance to 45 degrees modulo 90.
double dist_to_diagonal(double angle_deg) {
  double m = std::fmod(angle_deg, 90.0);
  if (m < 0.0) m += 90.0;
  return std::abs(m - 45.0);
}

double angle_dist_mod90(double a, double b) {
  double d = std::fmod(std::abs(a - b), 90.0);
  return std::min(d, 90.0 - d);
}

double x_family_zeta(double eps, double delta) {
  const double num = (1.0 - 2.0 * delta) * eps + 2.0 * delta;
  return num * num / ((1.0 - 2.0 * delta) * eps * eps + 2.0 * delta);
}

}  // namespace

std::string version_string() { return ONEBIT_VERSION; }

json Report::to_json(const ExperimentConfig& config, bool with_payload) const {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  j["version"] = version_string();
  j["config"] = config_to_json(config);
  j["out_path"] = out_path;
  j["checks"] = checks_to_json(checks);
  j["pass"] = all_pass;
  if (with_payload) j["payload"] = payload;
  return j;
}

VardropResult discrete_bipartition_search(const AnalyticSource& src) {
  const auto& atoms = src.atoms();
  const double var = variance(src);
  const double med = median(src);
  const std::size_t m = atoms.size();
  if (m < 2)
    throw std::invalid_argument("discrete_bipartition_search: need >= 2 atoms");

  bool found = false;
  double best_mse = 0.0, best_w = 0.0;
  OneBitQuantizer best_q{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i + 1 < m; ++i) {
    double mass_lo = 0.0, sum_lo = 0.0, mass_hi = 0.0, sum_hi = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j <= i) {
        mass_lo += atoms[j].mass;
        sum_lo += atoms[j].mass * atoms[j].x;
      } else {
        mass_hi += atoms[j].mass;
        sum_hi += atoms[j].mass * atoms[j].x;
      }
    }
    if (mass_lo < 1e-9 || mass_hi < 1e-9) continue;
    const double r_lo = sum_lo / mass_lo;
    const double r_hi = sum_hi / mass_hi;
    double err = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double r = (j <= i) ? r_lo : r_hi;
      err += atoms[j].mass * (atoms[j].x - r) * (atoms[j].x - r);
    }
    const double w = 0.5 * (atoms[i].x + atoms[i + 1].x);
    bool take = !found;
    if (found) {
      const double eps = 1e-12 * std::max(std::abs(err), std::abs(best_mse));
      if (err < best_mse - eps) {
        take = true;
      } else if (err <= best_mse + eps) {
        const double d_new = std::abs(w - med);
        const double d_old = std::abs(best_w - med);
        take = d_new < d_old || (d_new == d_old && w < best_w);
      }
    }
    if (take) {
      found = true;
      best_mse = err;
      best_w = w;
      best_q = OneBitQuantizer{w, r_lo, r_hi};
    }
  }
  if (!found)
    throw std::invalid_argument("discrete_bipartition_search: no valid split");
  return VardropResult{var - best_mse, best_w, best_q, best_mse};
}

Report cmd_amenability_table(const ExperimentConfig& config) {
  Report rep;
  rep.command = "amenability-table";

  struct Row {
    std::string name;
    AnalyticSource src;
    double zeta_exact;
  };
  std::vector<Row> rows;
  rows.push_back({"uniform", AnalyticSource::uniform(1.0), 0.75});
  rows.push_back({"unif*unif", AnalyticSource::triangular(1.0), 2.0 / 3.0});
  rows.push_back({"gaussian", AnalyticSource::gaussian(1.0), 2.0 / kPi});
  rows.push_back({"laplacian", AnalyticSource::laplace(1.0), 0.5});

  struct XRow {
    double eps, delta;
  };
  std::vector<XRow> x_rows = {{0.1, 0.01},   {0.01, 0.01},   {0.001, 0.01},
                              {0.1, 0.0001}, {0.01, 0.0001}, {0.001, 0.0001}};
  const bool custom = [&] {
    for (const XRow& r : x_rows)
      if (r.eps == config.eps && r.delta == config.delta) return false;
    return true;
  }();
  if (custom) x_rows.push_back({config.eps, config.delta});

  for (const XRow& r : x_rows) {
    std::ostringstream name;
    name << "x(eps=" << format_double(r.eps) << ";delta=" << format_double(r.delta)
         << ")";
    rows.push_back({name.str(), x_eps_delta(r.eps, r.delta),
                    x_family_zeta(r.eps, r.delta)});
  }

  std::ostringstream csv;
  csv << "distribution,zeta_analytic,zeta_mc,abs_error\n";
  json table = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    const double zeta = amenability(row.src);
    RngStream stream(config.seed, derive_stream(1, static_cast<std::uint64_t>(i)));
    const Eigen::VectorXd x = sample_values(row.src, config.samples, stream);
    const double mc_abs = x.array().abs().mean();
    const double mc_m2 = x.array().square().mean();
    const double zeta_mc = mc_abs * mc_abs / mc_m2;
    const double err = std::abs(zeta_mc - zeta);

    csv << row.name << ',' << format_double(zeta) << ',' << format_double(zeta_mc)
        << ',' << format_double(err) << '\n';
    json jr;
    jr["distribution"] = row.name;
    jr["zeta_analytic"] = zeta;
    jr["zeta_mc"] = zeta_mc;
    jr["abs_error"] = err;
    table.push_back(std::move(jr));

    add_check(rep, "zeta_exact[" + row.name + "]", zeta, 1e-12,
              std::abs(zeta - row.zeta_exact) <= 1e-12);
    if (i < 4)
      add_check(rep, "zeta_mc_error[" + row.name + "]", err, 5e-3, err <= 5e-3);
  }

  // The family degenerates as eps falls at fixed small delta.
  const double z1 = x_family_zeta(0.1, 1e-4);
  const double z2 = x_family_zeta(0.01, 1e-4);
  const double z3 = x_family_zeta(0.001, 1e-4);
  add_check(rep, "x_family_monotone_in_eps", std::min(z1 - z2, z2 - z3), 0.0,
            z1 > z2 && z2 > z3);
  add_check(rep, "x_family_small_eps_zeta", z3, 0.05, z3 < 0.05);

  rep.payload["table"] = std::move(table);
  emit(rep, config, csv.str());
  return rep;
}

Report cmd_counterexample(const ExperimentConfig& config) {
  Report rep;
  rep.command = "counterexample";

  const double third = 1.0 / 3.0;
  const AnalyticSource src = AnalyticSource::discrete(
      {{-1.0, third}, {0.0, third}, {1.0, third}});

  const VardropResult sweep = vardrop_sweep(src);
  const VardropResult sym = best_symmetric(src);
  const VardropResult oracle = discrete_bipartition_search(src);

  add_check(rep, "unconstrained_mse", sweep.mse, 1e-12,
            std::abs(sweep.mse - 1.0 / 6.0) <= 1e-12);
  add_check(rep, "symmetric_mse", sym.mse, 1e-12,
            std::abs(sym.mse - 2.0 / 9.0) <= 1e-12);
  add_check(rep, "recon_low", sweep.quantizer.recon_low, 1e-12,
            std::abs(sweep.quantizer.recon_low + 1.0) <= 1e-12);
  add_check(rep, "recon_high", sweep.quantizer.recon_high, 1e-12,
            std::abs(sweep.quantizer.recon_high - 0.5) <= 1e-12);
  add_check(rep, "sweep_vs_oracle_vardrop",
            std::abs(sweep.vardrop - oracle.vardrop), 1e-13,
            std::abs(sweep.vardrop - oracle.vardrop) <= 1e-13);
  add_check(rep, "sweep_vs_oracle_threshold",
            std::abs(sweep.argmax_threshold - oracle.argmax_threshold), 1e-15,
            std::abs(sweep.argmax_threshold - oracle.argmax_threshold) <= 1e-15);
  add_check(rep, "asymmetric_beats_symmetric", sym.mse - sweep.mse, 0.0,
            sweep.mse < sym.mse);

  rep.payload["vardrop"] = sweep.vardrop;
  rep.payload["mse_unconstrained"] = sweep.mse;
  rep.payload["mse_symmetric"] = sym.mse;
  rep.payload["threshold"] = sweep.argmax_threshold;
  rep.payload["recons"] = {sweep.quantizer.recon_low, sweep.quantizer.recon_high};
  rep.payload["recons_symmetric"] = {sym.quantizer.recon_low,
                                     sym.quantizer.recon_high};
  rep.payload["oracle_vardrop"] = oracle.vardrop;
  rep.payload["oracle_mse"] = oracle.mse;

  emit(rep, config, checks_to_csv(rep.checks));
  return rep;
}

Report cmd_laplace2d(const ExperimentConfig& config) {
  Report rep;
  rep.command = "laplace2d";

  const VectorSource src = laplace_pair(1.0);
  Eigen::Vector2d diag(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  Eigen::Vector2d axis(1.0, 0.0);

  const double target = 3.0 / (2.0 * std::sqrt(2.0));
  const double closed_form = laplace_pair_abs_mean(1.0, diag);
  add_check(rep, "diagonal_abs_mean_closed_form",
            std::abs(closed_form - target), 1e-10,
            std::abs(closed_form - target) <= 1e-10);

  RngStream grid_stream(config.seed, derive_stream(2, 0));
  const SearchResult grid =
      grid_search_2d(src, config.angles, config.samples, grid_stream);
  const double winner_deg = direction_angle_deg(grid.best_direction);
  const double d45 = dist_to_diagonal(winner_deg);
  add_check(rep, "grid_winner_within_1deg_of_diagonal", d45, 1.0, d45 <= 1.0);

  RngStream diag_stream(config.seed, derive_stream(2, 1));
  RngStream axis_stream(config.seed, derive_stream(2, 2));
  const McEstimate vd = vardrop_along(src, diag, config.samples, diag_stream,
                                      config.min_cell);
  const McEstimate va = vardrop_along(src, axis, config.samples, axis_stream,
                                      config.min_cell);
  const double se = std::hypot(vd.std_error, va.std_error);
  const double margin = se > 0.0 ? (vd.value - va.value) / se : 0.0;
  add_check(rep, "diagonal_beats_axis_margin_sigmas", margin, 5.0, margin > 5.0);

  RngStream ascent_stream(config.seed, derive_stream(2, 3));
  const SearchResult ascent =
      ascent_search(src, axis, 60, config.samples, ascent_stream);
  const double ascent_deg = direction_angle_deg(ascent.best_direction);
  const double agree = angle_dist_mod90(ascent_deg, winner_deg);
  add_check(rep, "ascent_matches_grid_within_2deg", agree, 2.0, agree <= 2.0);

  std::ostringstream csv;
  csv << "angle_deg,objective\n";
  json trace = json::array();
  for (const DirectionEval& e : grid.trace) {
    const double a = direction_angle_deg(e.direction);
    csv << format_double(a) << ',' << format_double(e.objective) << '\n';
    trace.push_back({{"angle_deg", a}, {"objective", e.objective}});
  }

  rep.payload["winner_angle_deg"] = winner_deg;
  rep.payload["winner_objective"] = grid.vardrop;
  rep.payload["vardrop_diagonal"] = vd.value;
  rep.payload["vardrop_diagonal_se"] = vd.std_error;
  rep.payload["vardrop_axis"] = va.value;
  rep.payload["vardrop_axis_se"] = va.std_error;
  rep.payload["ascent_angle_deg"] = ascent_deg;
  rep.payload["ascent_objective"] = ascent.vardrop;
  rep.payload["ascent_status"] =
      ascent.status == SearchStatus::stalled ? "stalled" : "step_limit";
  rep.payload["trace"] = std::move(trace);

  emit(rep, config, csv.str());
  return rep;
}

Report cmd_sawbridge(const ExperimentConfig& config) {
  Report rep;
  rep.command = "sawbridge";
  const Eigen::Index n = config.grid_n;

  // Sign-of-dc quantizer against the Monte Carlo mse; target is the exact
  // trace 1/6 minus the DC variance drop 1/16.
  RngStream mse_stream(config.seed, derive_stream(3, 0));
  const McEstimate mc = mc_mse(config.num_paths, n, mse_stream);
  const double mse_target = 1.0 / 6.0 - 1.0 / 16.0;
  add_check(rep, "mc_mse_error", std::abs(mc.value - mse_target), 1e-3,
            std::abs(mc.value - mse_target) <= 1e-3);

  // Discretized eigensystem.
  const Eigen::VectorXd eigs = discrete_eigs(n, 5);
  const double c = 1.0 / (4.0 * kPi * kPi);
  const double targets[5] = {1.0 / 12.0, c, c, c / 4.0, c / 4.0};
  for (int i = 0; i < 5; ++i) {
    const double rel = std::abs(eigs[i] - targets[i]) / targets[i];
    add_check(rep, "eigenvalue_rel_error[" + std::to_string(i + 1) + "]", rel,
              0.01, rel <= 0.01);
  }
  const Eigen::VectorXd t = grid_times(n);
  double trace = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    trace += autocorr(t[i], t[i]) / static_cast<double>(n);
  add_check(rep, "kernel_trace_error", std::abs(trace - 1.0 / 6.0), 1e-3,
            std::abs(trace - 1.0 / 6.0) <= 1e-3);

  // DC/AC independence diagnostics for five DC fractions over seeded runs.
  const KLBasis basis = make_kl_basis(n, config.k_max);
  const double thetas[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<PathGrid> dirs;
  for (int j = 0; j < 5; ++j) {
    RngStream dstream(config.seed, derive_stream(4, static_cast<std::uint64_t>(j)));
    dirs.push_back(random_kl_direction(basis, thetas[j], 1, dstream));
  }
  int runs_passed = 0;
  json independence = json::array();
  for (int r = 0; r < config.num_runs; ++r) {
    RngStream run_stream(config.seed,
                         derive_stream(5, static_cast<std::uint64_t>(r)));
    const std::vector<IndependenceReport> reports =
        verify_dc_ac_independence_many(dirs, config.num_paths, run_stream);
    bool run_ok = true;
    for (const IndependenceReport& lr : reports) run_ok = run_ok && lr.chi2_pass;
    if (run_ok) ++runs_passed;
    if (r == 0) {
      for (std::size_t j = 0; j < reports.size(); ++j) {
        const IndependenceReport& lr = reports[j];
        const std::string label = format_double(thetas[j]);
        add_check(rep, "indep_corr[theta=" + label + "]", std::abs(lr.corr),
                  lr.corr_threshold, lr.corr_pass);
        add_check(rep, "indep_var_additivity[theta=" + label + "]",
                  std::abs(lr.var_z - lr.var_split_sum),
                  lr.additivity_threshold, lr.additivity_pass);
        json jl;
        jl["theta"] = lr.theta;
        jl["corr"] = lr.corr;
        jl["chi2"] = lr.chi2;
        jl["p_value"] = lr.p_value;
        jl["var_z"] = lr.var_z;
        independence.push_back(std::move(jl));
      }
    }
  }
  add_check(rep, "indep_chi2_runs_passed", runs_passed,
            static_cast<double>(config.num_runs - 1),
            runs_passed >= config.num_runs - 1);

  // Theta-regime checks and the dominance of the DC direction.
  RngStream regime_stream(config.seed, derive_stream(6, 0));
  const ThetaRegimesReport regimes = verify_theta_regimes(
      config.num_directions, config.num_paths, regime_stream, n, config.k_max);
  add_check(rep, "regime_vardrop_violations", regimes.vardrop_violations, 0.0,
            regimes.vardrop_violations == 0);
  add_check(rep, "regime_var_violations", regimes.var_violations, 0.0,
            regimes.var_violations == 0);
  add_check(rep, "regime_bound_violations", regimes.bound_violations, 0.0,
            regimes.bound_violations == 0);

  rep.payload["mc_mse"] = mc.value;
  rep.payload["mc_mse_se"] = mc.std_error;
  rep.payload["eigenvalues"] = std::vector<double>(eigs.data(), eigs.data() + 5);
  rep.payload["kernel_trace"] = trace;
  rep.payload["independence"] = std::move(independence);
  rep.payload["indep_runs_passed"] = runs_passed;
  json regime_dirs = json::array();
  for (const DirectionCheck& d : regimes.directions) {
    json jd;
    jd["theta"] = d.theta;
    jd["var_z"] = d.var_z;
    jd["vardrop"] = d.vardrop;
    jd["vardrop_se"] = d.vardrop_se;
    if (!std::isnan(d.two_atom_bound)) jd["two_atom_bound"] = d.two_atom_bound;
    jd["flagged"] = d.ac_support_flagged;
    regime_dirs.push_back(std::move(jd));
  }
  rep.payload["regime_directions"] = std::move(regime_dirs);
  rep.payload["regime_flagged"] = regimes.flagged;

  if (!config.export_paths.empty()) {
    RngStream path_stream(config.seed, derive_stream(7, 0));
    Eigen::MatrixXd paths(config.export_count, n);
    for (Eigen::Index p = 0; p < config.export_count; ++p)
      paths.row(p) = sample_stationary(sample_draw(path_stream), n).values;
    std::ofstream out(config.export_paths, std::ios::binary);
    if (!out) throw UsageError("cannot open export path: " + config.export_paths);
    write_paths_csv(out, paths);
    rep.payload["exported_paths"] = config.export_count;
  }

  emit(rep, config, checks_to_csv(rep.checks));
  return rep;
}

Report cmd_contour(const ExperimentConfig& config) {
  Report rep;
  rep.command = "contour";
  constexpr int kGrid = 64;

  // Cell-centered drop/phase grid keeps u = 1/2 off the lattice, where the
  // grid DC sign would be dominated by discretization.
  Eigen::MatrixXi bits(kGrid, kGrid);
  std::vector<double> us(kGrid), vs(kGrid);
  for (int i = 0; i < kGrid; ++i)
    us[i] = (static_cast<double>(i) + 0.5) / kGrid;
  for (int j = 0; j < kGrid; ++j)
    vs[j] = (static_cast<double>(j) + 0.5) / kGrid;
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j) {
      const PathGrid path =
          sample_stationary(SawbridgeDraw{us[i], vs[j]}, config.grid_n);
      bits(i, j) = optimal_quantize(path).bit;
    }

  int mismatches = 0;
  for (int i = 0; i < kGrid; ++i) {
    const int expected = us[i] > 0.5 ? 1 : 0;
    for (int j = 0; j < kGrid; ++j)
      if (bits(i, j) != expected) ++mismatches;
  }
  add_check(rep, "bit_matrix_matches_drop_rule", mismatches, 0.0,
            mismatches == 0);

  int distinct_rows = 1;
  bool rows_constant = true;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 1; j < kGrid; ++j)
      if (bits(i, j) != bits(i, 0)) rows_constant = false;
    if (i > 0 && bits(i, 0) != bits(i - 1, 0)) ++distinct_rows;
  }
  add_check(rep, "two_constant_bands", distinct_rows, 2.0,
            rows_constant && distinct_rows == 2);

  std::ostringstream csv;
  csv << "u";
  for (int j = 0; j < kGrid; ++j) csv << ",v_" << j;
  csv << '\n';
  for (int i = 0; i < kGrid; ++i) {
    csv << format_double(us[i]);
    for (int j = 0; j < kGrid; ++j) csv << ',' << bits(i, j);
    csv << '\n';
  }

  // Optional side-by-side comparison with an externally produced bit matrix
  // in the same layout.
  if (!config.compare_path.empty()) {
    std::ifstream in(config.compare_path);
    if (!in) throw UsageError("cannot open compare path: " + config.compare_path);
    std::string line;
    std::getline(in, line);  // header
    int agree = 0, total = 0, row = 0;
    while (std::getline(in, line) && row < kGrid) {
      std::istringstream ls(line);
      std::string field;
      std::getline(ls, field, ',');  // u column
      int col = 0;
      while (std::getline(ls, field, ',') && col < kGrid) {
        int b = 0;
        try {
          b = std::stoi(field);
        } catch (const std::exception&) {
          throw UsageError("compare matrix: malformed value at row " +
                           std::to_string(row));
        }
        agree += (b == bits(row, col)) ? 1 : 0;
        ++total;
        ++col;
      }
      ++row;
    }
    if (total != kGrid * kGrid)
      throw UsageError("compare matrix: expected 64x64 bits");
    rep.payload["compare_agreement"] =
        static_cast<double>(agree) / static_cast<double>(total);
  }

  json matrix = json::array();
  for (int i = 0; i < kGrid; ++i) {
    json jrow = json::array();
    for (int j = 0; j < kGrid; ++j) jrow.push_back(bits(i, j));
    matrix.push_back(std::move(jrow));
  }
  rep.payload["u"] = us;
  rep.payload["v"] = vs;
  rep.payload["bits"] = std::move(matrix);

  emit(rep, config, csv.str());
  return rep;
}

Report cmd_empirical_vardrop(const ExperimentConfig& config) {
  Report rep;
  rep.command = "empirical-vardrop";
  if (config.input_path.empty())
    throw UsageError("empirical-vardrop requires --input with a sample csv");
  std::ifstream in(config.input_path);
  if (!in) throw UsageError("cannot open input: " + config.input_path);

  std::string line;
  if (!std::getline(in, line)) throw UsageError("sample csv: empty file");
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      while (used < line.size() &&
             (line[used] == ' ' || line[used] == '\r' || line[used] == '\t'))
        ++used;
      if (used != line.size()) throw std::invalid_argument("trailing data");
      values.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("sample csv: malformed line " + std::to_string(lineno));
    }
  }
  if (static_cast<Eigen::Index>(values.size()) < 2 * config.min_cell)
    throw UsageError("sample csv: need at least 2*min_cell = " +
                     std::to_string(2 * config.min_cell) + " rows, got " +
                     std::to_string(values.size()));

  const SampleSet samples(Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size())));
  const EmpiricalVardrop ev = empirical_vardrop(samples, config.min_cell);

  const double sample_var = samples.variance();
  add_check(rep, "vardrop_nonnegative", ev.result.vardrop, 0.0,
            ev.result.vardrop >= 0.0);
  add_check(rep, "mse_identity",
            std::abs(ev.result.mse - (sample_var - ev.result.vardrop)), 1e-10,
            std::abs(ev.result.mse - (sample_var - ev.result.vardrop)) <= 1e-10);

  rep.payload["n"] = samples.count();
  rep.payload["vardrop"] = ev.result.vardrop;
  rep.payload["std_error"] = ev.std_error;
  rep.payload["threshold"] = ev.result.argmax_threshold;
  rep.payload["recon_low"] = ev.result.quantizer.recon_low;
  rep.payload["recon_high"] = ev.result.quantizer.recon_high;
  rep.payload["mse"] = ev.result.mse;
  rep.payload["sample_mean"] = samples.mean();
  rep.payload["sample_variance"] = sample_var;

  std::ostringstream csv;
  csv << "statistic,value\n"
      << "n," << samples.count() << '\n'
      << "vardrop," << format_double(ev.result.vardrop) << '\n'
      << "std_error," << format_double(ev.std_error) << '\n'
      << "threshold," << format_double(ev.result.argmax_threshold) << '\n'
      << "recon_low," << format_double(ev.result.quantizer.recon_low) << '\n'
      << "recon_high," << format_double(ev.result.quantizer.recon_high) << '\n'
      << "mse," << format_double(ev.result.mse) << '\n';
  emit(rep, config, csv.str());
  return rep;
}

Report run_command(const std::string& name, const ExperimentConfig& config) {
  if (name == "amenability-table") return cmd_amenability_table(config);
  if (name == "counterexample") return cmd_counterexample(config);
  if (name == "laplace2d") return cmd_laplace2d(config);
  if (name == "sawbridge") return cmd_sawbridge(config);
  if (name == "contour") return cmd_contour(config);
  if (name == "empirical-vardrop") return cmd_empirical_vardrop(config);
  throw UsageError("unknown command: " + name);
}

}  // namespace onebit
