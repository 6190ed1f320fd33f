#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "onebit/harness.hpp"

using namespace onebit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << content;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.samples = 50000;
  c.grid_n = 256;
  c.angles = 90;
  c.num_paths = 5000;
  c.k_max = 8;
  c.num_directions = 8;
  c.num_runs = 2;
  return c;
}

}  // namespace

TEST_CASE("reports carry the envelope fields") {
  ExperimentConfig c = small_config();
  c.out_path = "tmp_ce.json";
  c.format = ExperimentConfig::Format::json;
  const Report rep = cmd_counterexample(c);
  CHECK(rep.all_pass);
  const auto j = rep.to_json(c, true);
  CHECK(j.at("schema").get<int>() == 1);
  CHECK(j.at("command").get<std::string>() == "counterexample");
  CHECK_FALSE(j.at("version").get<std::string>().empty());
  CHECK(j.at("config").at("seed").get<std::uint64_t>() == c.seed);
  CHECK(j.at("checks").size() >= 5);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("payload").at("recons")[0].get<double>() == doctest::Approx(-1.0));
  CHECK(j.at("payload").at("recons")[1].get<double>() == doctest::Approx(0.5));

  // The written file is the same full report.
  const auto file = nlohmann::ordered_json::parse(slurp("tmp_ce.json"));
  CHECK(file.at("payload").at("mse_unconstrained").get<double>() ==
        doctest::Approx(1.0 / 6.0));
}

TEST_CASE("identical configs produce byte-identical outputs") {
  SUBCASE("amenability table csv") {
    ExperimentConfig c = small_config();
    c.out_path = "tmp_am_a.csv";
    cmd_amenability_table(c);
    const std::string a = slurp("tmp_am_a.csv");
    c.out_path = "tmp_am_b.csv";
    cmd_amenability_table(c);
    CHECK(a == slurp("tmp_am_b.csv"));
  }
  SUBCASE("contour matrix is seed independent") {
    ExperimentConfig c = small_config();
    c.out_path = "tmp_contour_a.csv";
    cmd_contour(c);
    c.out_path = "tmp_contour_b.csv";
    c.seed = 999;
    cmd_contour(c);
    CHECK(slurp("tmp_contour_a.csv") == slurp("tmp_contour_b.csv"));
  }
  SUBCASE("laplace2d json") {
    ExperimentConfig c = small_config();
    c.samples = 20000;
    c.angles = 16;
    c.format = ExperimentConfig::Format::json;
    c.out_path = "tmp_lap_a.json";
    cmd_laplace2d(c);
    const std::string a = slurp("tmp_lap_a.json");
    c.out_path = "tmp_lap_b.json";
    cmd_laplace2d(c);
    std::string b = slurp("tmp_lap_b.json");
    // The config echo embeds out_path; normalize it before comparing.
    const auto pos_a = a.find("tmp_lap_a"), pos_b = b.find("tmp_lap_b");
    REQUIRE(pos_a != std::string::npos);
    REQUIRE(pos_b != std::string::npos);
    b.replace(pos_b, 9, "tmp_lap_a");
    while (true) {
      const auto p = b.find("tmp_lap_b");
      if (p == std::string::npos) break;
      b.replace(p, 9, "tmp_lap_a");
    }
    CHECK(a == b);
  }
}

TEST_CASE("amenability table layout") {
  ExperimentConfig c = small_config();
  c.out_path = "tmp_table.csv";
  const Report rep = cmd_amenability_table(c);
  CHECK(rep.all_pass);
  std::istringstream in(slurp("tmp_table.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "distribution,zeta_analytic,zeta_mc,abs_error");
  int rows = 0;
  double uniform_zeta = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.rfind("uniform,", 0) == 0) {
      std::istringstream ls(line);
      std::string name, zeta;
      std::getline(ls, name, ',');
      std::getline(ls, zeta, ',');
      uniform_zeta = std::stod(zeta);
    }
  }
  CHECK(rows == 10);  // 4 standard rows plus the 6-point (eps, delta) grid
  CHECK(uniform_zeta == doctest::Approx(0.75));
}

TEST_CASE("sawbridge command aggregates the independence and regime checks") {
  ExperimentConfig c = small_config();
  c.out_path = "tmp_saw.json";
  c.format = ExperimentConfig::Format::json;
  const Report rep = cmd_sawbridge(c);
  CHECK(rep.all_pass);
  const auto j = nlohmann::ordered_json::parse(slurp("tmp_saw.json"));
  CHECK(j.at("payload").at("eigenvalues").size() == 5);
  CHECK(j.at("payload").at("mc_mse").get<double>() ==
        doctest::Approx(5.0 / 48.0).epsilon(0.05));
  CHECK(j.at("payload").at("independence").size() == 5);
  CHECK(j.at("payload").at("regime_directions").size() == 8);
}

TEST_CASE("contour command and the comparison hook") {
  ExperimentConfig c = small_config();
  c.out_path = "tmp_contour.csv";
  const Report rep = cmd_contour(c);
  CHECK(rep.all_pass);

  SUBCASE("self comparison agrees everywhere") {
    ExperimentConfig c2 = c;
    c2.compare_path = "tmp_contour.csv";
    c2.out_path = "tmp_contour2.csv";
    const Report rep2 = cmd_contour(c2);
    CHECK(rep2.payload.at("compare_agreement").get<double>() == 1.0);
  }
  SUBCASE("malformed comparison matrix is a usage error") {
    spit("tmp_badcmp.csv", "u,v_0\n0.5,not_a_bit\n");
    ExperimentConfig c3 = c;
    c3.compare_path = "tmp_badcmp.csv";
    c3.out_path = "tmp_contour3.csv";
    CHECK_THROWS_AS(cmd_contour(c3), UsageError);
  }
}

TEST_CASE("empirical-vardrop command") {
  SUBCASE("coin flips have unit normalized drop") {
    std::ostringstream data;
    data << "x\n";
    for (int i = 0; i < 500; ++i) data << (i % 2 ? "1.0" : "-1.0") << "\n";
    spit("tmp_coins.csv", data.str());
    ExperimentConfig c = small_config();
    c.input_path = "tmp_coins.csv";
    c.out_path = "tmp_coins_out.csv";
    const Report rep = cmd_empirical_vardrop(c);
    CHECK(rep.all_pass);
    CHECK(rep.payload.at("vardrop").get<double>() == doctest::Approx(1.0));
    CHECK(rep.payload.at("mse").get<double>() ==
          doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("too few rows is a usage error with a clear message") {
    std::ostringstream data;
    data << "x\n";
    for (int i = 0; i < 10; ++i) data << i << ".5\n";
    spit("tmp_few.csv", data.str());
    ExperimentConfig c = small_config();
    c.input_path = "tmp_few.csv";
    c.min_cell = 8;
    try {
      cmd_empirical_vardrop(c);
      FAIL("expected UsageError");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("min_cell") != std::string::npos);
    }
  }
  SUBCASE("malformed rows are rejected") {
    spit("tmp_bad.csv", "x\n1.0\nnot-a-number\n2.0\n");
    ExperimentConfig c = small_config();
    c.input_path = "tmp_bad.csv";
    CHECK_THROWS_AS(cmd_empirical_vardrop(c), UsageError);
  }
  SUBCASE("missing input is a usage error") {
    ExperimentConfig c = small_config();
    c.input_path = "";
    CHECK_THROWS_AS(cmd_empirical_vardrop(c), UsageError);
    c.input_path = "definitely_missing.csv";
    CHECK_THROWS_AS(cmd_empirical_vardrop(c), UsageError);
  }
}

TEST_CASE("run_command dispatch") {
  ExperimentConfig c = small_config();
  c.out_path = "tmp_dispatch.csv";
  CHECK(run_command("counterexample", c).command == "counterexample");
  CHECK_THROWS_AS(run_command("nope", c), UsageError);
}

TEST_CASE("unwritable output path is a usage error") {
  ExperimentConfig c = small_config();
  c.out_path = "no_such_dir/tmp.csv";
  CHECK_THROWS_AS(cmd_counterexample(c), UsageError);
}
