#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "eulermax/error.hpp"
#include "eulermax/experiments.hpp"
#include "eulermax/rng.hpp"

using namespace eulermax;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t direct_count(const GoodSet& set, double z, double spacing, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (contains(set, z + static_cast<double>(i) * spacing)) ++c;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("good set helpers") {
  const GoodSet g{{0.0, 1.0}, {2.0, 2.5}};
  CHECK(measure(g) == 1.5);
  CHECK(contains(g, 1.0));
  CHECK(contains(g, 2.25));
  CHECK_FALSE(contains(g, 1.5));
}

TEST_CASE("discretization of the full circle") {
  const double T = 1e5;
  const double E = ModelParams::scaled_defaults(T).E;
  const auto d = discretize_good_set({{0.0, kTwoPi}}, E, T);
  const double full = std::floor(kTwoPi * std::log(T) / E);
  CHECK(d.indices.size() == d.lattice_size);
  CHECK(std::abs(static_cast<double>(d.indices.size()) - full) <= 1.0);
  CHECK(d.z == 0.0);
  for (std::size_t k = 0; k < d.Hstar.size(); ++k) CHECK(d.Hstar[k] == d.h(d.indices[k]));
}

TEST_CASE("discretization keeps at least 1.98 pi log T / E points") {
  const double T = 1e30;
  const double E = 1.0;
  const auto d = discretize_good_set({{0.0, 1.99 * std::numbers::pi}}, E, T);
  CHECK(static_cast<double>(d.indices.size()) >= 1.98 * std::numbers::pi * std::log(T) / E);
}

TEST_CASE("discretization of a fragmented good set meets the averaging bound") {
  const double T = 1e5;
  const double E = 1.0;
  const CounterRng rng(11, Stream::good_set);
  // 199 disjoint intervals of total measure 1.99 pi: random gaps, fixed lengths.
  const std::size_t n = 199;
  const double total = 1.99 * std::numbers::pi;
  const double len = total / n;
  std::vector<double> gaps(n + 1);
  double gsum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) gsum += gaps[i] = rng.uniform(0, i);
  GoodSet set;
  double at = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    at += gaps[i] / gsum * (kTwoPi - total);
    set.push_back({at, at + len});
    at += len;
  }
  CHECK(measure(set) == doctest::Approx(total).epsilon(1e-12));
  const auto d = discretize_good_set(set, E, T);
  const double bound = measure(set) * std::log(T) / E - 1.0;
  CHECK(static_cast<double>(d.indices.size()) >= bound);
  CHECK(d.indices.size() == direct_count(set, d.z, d.spacing, d.lattice_size));
  for (int k = 0; k < 64; ++k)
    CHECK(direct_count(set, d.spacing * k / 64.0, d.spacing, d.lattice_size) <= d.indices.size());
}

TEST_CASE("a good set between the scanned offsets is rejected") {
  const double T = 1e5;
  const double s = 1.0 / std::log(T);
  const double fine = s / 64.0;
  GoodSet set;
  for (double h = 0.25 * fine; h + 0.5 * fine < kTwoPi; h += fine) set.push_back({h, h + 0.5 * fine});
  CHECK_THROWS_AS(discretize_good_set(set, 1.0, T), ConstructionError);
  CHECK_THROWS_AS(discretize_good_set({{0.0, 0.5 * s}}, 1.0, T), ParameterError);
  CHECK_THROWS_AS(discretize_good_set({{1.0, 2.0}, {1.5, 3.0}}, 1.0, T), ParameterError);
}

TEST_CASE("blocks on the full lattice") {
  const double T = 1e30;
  const double y = std::exp(3.0);
  const double K = 1.0;
  auto d = build_blocks(discretize_good_set({{0.0, kTwoPi}}, 1.0, T, y), K, T);
  REQUIRE(d.blocks.size() == 3);
  const double w = DiscretizationParams::window_width(T, 1.0, y, K);
  std::vector<long> windows;
  for (const auto& b : d.blocks) {
    CHECK(static_cast<double>(b.size()) >= w / 2.0);
    const long j = static_cast<long>(std::floor(static_cast<double>(b.front()) / w));
    CHECK(j % 2 == 0);
    CHECK(static_cast<double>(b.back()) <= (j + 1) * w + 1e-9);
    windows.push_back(j);
  }
  std::sort(windows.begin(), windows.end());
  CHECK(std::adjacent_find(windows.begin(), windows.end()) == windows.end());

  // Every even window qualifies on the full lattice.
  const auto j_max = static_cast<long>(std::floor(kTwoPi * K * std::log(y)));
  std::size_t qualifying = 0;
  for (long j = 0; j <= j_max; j += 2) {
    std::size_t c = 0;
    for (std::size_t i : d.indices)
      if (i >= j * w - 1e-9 && i <= (j + 1) * w + 1e-9) ++c;
    if (c >= w / 2.0) ++qualifying;
  }
  CHECK(qualifying == static_cast<std::size_t>(j_max / 2 + 1));
}

TEST_CASE("blocks fail when the good set avoids even windows") {
  const double T = 1e30;
  const double y = std::exp(3.0);
  auto d = discretize_good_set({{0.0, kTwoPi}}, 1.0, T, y);
  const double w = DiscretizationParams::window_width(T, 1.0, y, 1.0);
  std::vector<std::size_t> odd;
  for (std::size_t i : d.indices) {
    const double x = static_cast<double>(i) / w;
    if (static_cast<long>(std::floor(x)) % 2 == 1 && x - std::floor(x) > 1e-6) odd.push_back(i);
  }
  d.indices = odd;
  CHECK_THROWS_AS(build_blocks(d, 1.0, T), ConstructionError);
}

TEST_CASE("default blocks at T = 1e5") {
  const double T = 1e5;
  const double y = 112.0;
  const double K = 10.0;
  const double E = ModelParams::scaled_defaults(T).E;
  const auto d = build_blocks(discretize_good_set({{0.0, 1.99 * std::numbers::pi}}, E, T, y), K, T);
  REQUIRE(d.blocks.size() == 4);
  double closest = 1e300;
  for (std::size_t a = 0; a < d.blocks.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      for (std::size_t i : d.blocks[a])
        for (std::size_t j : d.blocks[b]) closest = std::min(closest, std::abs(d.h(i) - d.h(j)));
  CHECK(closest >= 1.0 / (K * std::log(y)));
}

TEST_CASE("reference levels") {
  const double T = 1e5;
  CHECK(reference_upper(T) == doctest::Approx(std::log(std::log(T)) - 0.25 * std::log(std::log(std::log(T)))));
  CHECK(reference_lower(T) < reference_upper(T));
}

TEST_CASE("git style hash") {
  CHECK(git_style_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_style_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("campaign determinism and invariants") {
  ExperimentConfig c;
  c.T_list = {1e3, 1e4};
  c.n_trials = 40;
  c.seed = 3;
  c.threads = 1;
  const auto a = run_max_campaign(c);
  c.threads = 4;
  const auto b = run_max_campaign(c);
  CHECK(records_csv(a.records) == records_csv(b.records));
  CHECK(a.run_hash == b.run_hash);
  REQUIRE(a.records.size() == 80);
  for (const auto& r : a.records) CHECK(r.restricted_max <= r.max_value);
  REQUIRE(a.per_T.size() == 2);
  for (const auto& s : a.per_T) {
    CHECK(s.q05 <= s.median);
    CHECK(s.median <= s.q95);
    CHECK(s.restricted_median <= s.median);
    std::size_t total = 0;
    for (auto n : s.max_histogram.counts) total += n;
    CHECK(total == 40);
  }

  ExperimentConfig one = c;
  one.T_list = {1e4};
  one.n_trials = 1;
  const auto x = run_max_campaign(one);
  const auto y = run_max_campaign(one);
  CHECK(records_csv(x.records) == records_csv(y.records));
  // Records at a given T do not depend on the other entries of T_list.
  CHECK(x.records[0].max_value == a.records[40].max_value);

  one.seed = 4;
  CHECK(run_max_campaign(one).records[0].max_value != x.records[0].max_value);
}

TEST_CASE("campaign output files") {
  const auto dir = std::filesystem::temp_directory_path() / "eulermax_campaign_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c;
  c.T_list = {1e3};
  c.n_trials = 5;
  c.output_dir = dir;
  const auto res = run_max_campaign(c);
  const std::string csv = slurp(dir / "records.csv");
  CHECK(csv == records_csv(res.records));
  CHECK(csv.rfind("T,trial,max,argmax_h,restricted_max\n", 0) == 0);
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find(res.run_hash) != std::string::npos);
  CHECK(res.run_hash.size() == 40);
  std::filesystem::remove_all(dir);

  c.T_list = {10.0};
  CHECK_THROWS_AS(run_max_campaign(c), ParameterError);
  c.T_list = {1e3};
  c.good_set_measure = 7.0;
  CHECK_THROWS_AS(run_max_campaign(c), ParameterError);
}

TEST_CASE("chaining diagnostics") {
  const auto table = sieve(100000);
  CHECK(split_prime(table, 1e5) == 109);
  ModelParams p;
  p.T = 1e5;
  p.seed = 2;
  const auto rep = chaining_diagnostics(p, 10, 300, table);
  REQUIRE(rep.scales.size() == 10);
  for (const auto& s : rep.scales) {
    CHECK(s.variance == doctest::Approx(s.exact_variance).epsilon(0.1));
    // Weights (1 - log p/log T)^2 p^{-2/log T} hold the ratio near 0.075 at T = 1e5.
    if (s.k >= 2) CHECK(s.exact_variance / s.reference == doctest::Approx(0.0745).epsilon(0.01));
    if (s.k >= 3) CHECK(s.exceedances == 0);
    CHECK(s.n_increments == (std::size_t{1} << (s.k - 1)));
  }
  // Increments shrink by about 2 per scale.
  for (std::size_t k = 2; k < rep.scales.size(); ++k)
    CHECK(rep.scales[k].variance / rep.scales[k - 1].variance == doctest::Approx(0.25).epsilon(0.1));
  CHECK(scales_csv(rep).find("k,n_increments") == 0);
  CHECK_THROWS_AS(chaining_diagnostics(p, 21, 1, table), ParameterError);
}

TEST_CASE("three-event classification") {
  const SplitLevels lv = split_levels(1e7, 4.0);
  SplitInputs quiet{0.1, 0.2, 0.1, 0.2};
  CHECK_FALSE(split_premise(quiet, lv, 1.0));
  CHECK(classify_events(quiet, lv, 1.0) == kEventNone);

  SplitInputs small_huge{50.0, 0.3, 0.1, 50.2};
  const unsigned ev = classify_events(small_huge, lv, 0.0);
  CHECK((ev & (kEventFull | kEventLargeRise)) != 0);

  // The implication holds for any inputs at equal slack.
  const CounterRng rng(5, Stream::misc);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    SplitInputs in;
    in.small0 = 20.0 * (rng.uniform(i, 0) - 0.3);
    const double large0 = 10.0 * (rng.uniform(i, 1) - 0.5);
    in.large_rise = 5.0 * rng.uniform(i, 2);
    in.large_max = large0 + in.large_rise;
    in.full0 = in.small0 + large0;
    const double slack = 2.0 * rng.uniform(i, 3);
    if (split_premise(in, lv, slack)) CHECK(classify_events(in, lv, slack) != kEventNone);
    const double s = required_slack(in, lv);
    CHECK(classify_events(in, lv, s + 1e-9) != kEventNone);
  }
  CHECK_THROWS_AS(split_levels(1e7, 0.0), ParameterError);
}

TEST_CASE("three-event split check") {
  const auto table = sieve(100000);
  ModelParams p;
  p.T = 1e5;
  p.seed = 8;
  const auto rep = three_event_split_check(p, 10.0, 200, table);
  CHECK(rep.violations == 0);
  CHECK(rep.n_trials == 200);
  CHECK(rep.min_slack >= 0.0);
  const auto loose = three_event_split_check(p, 1.0, 200, table, 2.5);
  CHECK(loose.violations == 0);
  CHECK(loose.n_premise > 0);
}

TEST_CASE("empirical covariance") {
  const auto table = sieve(1000);
  const auto rows = empirical_covariance(table, 1000, 2, 1000, 64, 1500, 6);
  REQUIRE(rows.size() == 32);
  std::size_t ok = 0;
  for (const auto& r : rows)
    if (std::abs(r.empirical - r.exact) <= 5 * r.standard_error &&
        std::abs(r.shifted - r.exact) <= 5 * r.shifted_error)
      ++ok;
  CHECK(ok >= 30);
  CHECK(rows[0].dh == 0.0);
  const auto lag = empirical_lag_covariance(table, 1000, 2, 1000, Lattice{0.0, rows[1].dh, 3}, 1500, 6);
  REQUIRE(lag.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(lag[j].mean == doctest::Approx(rows[j].empirical).epsilon(1e-9));
    CHECK(lag[j].standard_error == doctest::Approx(rows[j].standard_error).epsilon(1e-9));
  }
}

TEST_CASE("surrogate comparison") {
  const double T = 1e4;
  const auto table = sieve(10000);
  const auto d = discretize_good_set({{0.0, 1.99 * std::numbers::pi}}, 1.0, T, 50.0);
  const auto cmp = surrogate_comparison(d, table, 400, 12);
  CHECK(cmp.n_points == d.Hstar.size());
  CHECK(cmp.euler_max.size() == 400);
  CHECK(cmp.ks <= 0.15);
}

TEST_CASE("lower bound and block comparison") {
  const auto table = sieve(100000);
  const CorrelationFunction corr(CovarianceSpec{112, 1e5, 1e5, &table});
  const double E = ModelParams::scaled_defaults(1e5).E;
  const auto row = lower_bound_check(corr, 3.0, 3, 0.1, 4000, 2);
  CHECK(row.bound <= row.empirical + 5 * row.standard_error);
  CHECK(row.bound > 0.0);

  auto d = discretize_good_set({{0.0, 1.99 * std::numbers::pi}}, E, 1e5, 112);
  d.blocks = {{d.indices[0], d.indices[1], d.indices[2]}};
  const auto same = block_comparison(d, corr, 1.0, 4000, 3);
  CHECK(same.bound == 0.0);
  CHECK(std::abs(same.p_joint - same.p_product) <= 5 * same.standard_error);
  const auto twin = block_comparison(build_blocks(d, 10.0, 1e5), corr, 1.3, 1000, 3, 0, true);
  CHECK(twin.bound == 0.0);

  const auto blocks = build_blocks(d, 10.0, 1e5);
  const auto rep = block_comparison(blocks, corr, 1.3, 4000, 3);
  CHECK(std::abs(rep.p_joint - rep.p_product) <= rep.bound + 5 * rep.standard_error);
}

TEST_CASE("talagrand tail check") {
  const auto table = sieve(10000);
  const auto rep = talagrand_tail_check(table, 1e4, 1000, 4000, 5, {1.0, 2.0});
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].bound == doctest::Approx(rep.rows[0].empirical));
  CHECK(rep.rows[1].empirical < rep.rows[0].empirical);
  CHECK(rep.calibration > 0.0);
}
