#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <sstream>

#include "beamloc/mc.hpp"

using namespace beamloc;

namespace {

SweepSpec small_spec() {
  SweepSpec spec{EdgeSample(1.0, 10.0, 30.2), BeamConfig(1.0, 30.0), ScanGeometry(60),
                 0.01,         std::nullopt,  std::nullopt,
                 SweptParameter::lambda,      {20.0, 40.0},
                 6,            12345,         SeriesControl()};
  return spec;
}

std::string report_csv(const McReport& report) {
  std::stringstream ss;
  write_report_csv(ss, report);
  return ss.str();
}

}  // namespace

TEST_CASE("sweep spec validation") {
  SweepSpec spec = small_spec();
  spec.n_trials = 1;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = small_spec();
  spec.values = {2.0, 2.0};
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = small_spec();
  spec.values.clear();
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("sweep output is identical across thread counts and reruns") {
  const SweepSpec spec = small_spec();
  const std::string a = report_csv(run_sweep(spec, 1));
  const std::string b = report_csv(run_sweep(spec, 4));
  const std::string c = report_csv(run_sweep(spec, 1));
  CHECK(a == b);
  CHECK(a == c);

  SweepSpec other = small_spec();
  other.master_seed = 999;
  CHECK(report_csv(run_sweep(other, 1)) != a);
}

TEST_CASE("report rows satisfy the moment identity and interval ordering") {
  const McReport report = run_sweep(small_spec(), 2);
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CHECK(row.sqrt_crb > 0.0);
    for (const auto& s : row.stats) {
      CHECK(s.n_used + s.n_failures == 6);
      if (s.n_used < 2) continue;
      const double n = s.n_used;
      const double rmse2 = s.bias * s.bias + s.stddev * s.stddev * (n - 1.0) / n;
      CHECK(s.rmse * s.rmse == doctest::Approx(rmse2).epsilon(1e-12));
      CHECK(s.std_lo <= s.stddev);
      CHECK(s.stddev <= s.std_hi);
      CHECK(s.rmse_lo <= s.rmse);
      CHECK(s.rmse <= s.rmse_hi);
      CHECK(s.bias_se > 0.0);
    }
  }
}

TEST_CASE("csv shape") {
  const McReport report = run_sweep(small_spec(), 2);
  const std::string csv = report_csv(report);
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line ==
        "swept_value,estimator,bias,bias_se,std,std_lo,std_hi,rmse,rmse_lo,rmse_hi,sqrt_crb,"
        "n_failures");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 6);  // 2 values x 3 estimators
  CHECK(csv.find("interpolation") != std::string::npos);
  CHECK(csv.find("mmle") != std::string::npos);
  CHECK(csv.find("mle") != std::string::npos);
}

TEST_CASE("crb curve: dose scaling and positivity over a beam-width range") {
  SweepSpec spec = small_spec();
  spec.parameter = SweptParameter::lambda;
  spec.values = {50.0, 100.0};
  const auto curve = crb_curve(spec);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].second == doctest::Approx(curve[1].second * std::sqrt(2.0)).epsilon(1e-12));

  SweepSpec widths = small_spec();
  widths.parameter = SweptParameter::sigma_b;
  widths.values = {0.1, 0.5, 1.0, 2.0, 3.0};
  for (const auto& [v, crb] : crb_curve(widths)) {
    CHECK(crb > 0.0);
    CHECK(std::isfinite(crb));
  }
}

TEST_CASE("crb over beam width has an interior minimum near 0.33 at gamma = 50.5") {
  SweepSpec spec{EdgeSample(1.0, 10.0, 50.5), BeamConfig(1.0, 200.0), ScanGeometry(100),
                 0.01,         std::nullopt,  std::nullopt,
                 SweptParameter::sigma_b,     {0.15, 0.25, 0.33, 0.45, 0.6, 1.0},
                 2,            0,             SeriesControl()};
  const auto curve = crb_curve(spec);
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second < curve[best].second) best = i;
  }
  CHECK(curve[best].first == doctest::Approx(0.33));
}

TEST_CASE("spec sidecar json echoes the sweep configuration") {
  std::stringstream ss;
  write_spec_json(ss, small_spec());
  const std::string j = ss.str();
  CHECK(j.find("\"swept_parameter\": \"lambda\"") != std::string::npos);
  CHECK(j.find("\"n_trials\": 6") != std::string::npos);
  CHECK(j.find("\"master_seed\": 12345") != std::string::npos);
  CHECK(j.find("\"length\": 60") != std::string::npos);
}
