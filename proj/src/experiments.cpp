#include "eulermax/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "eulermax/error.hpp"
#include "eulermax/gaussian.hpp"
#include "eulermax/numeric.hpp"
#include "eulermax/parallel.hpp"
#include "eulermax/rng.hpp"
#include "json.hpp"

namespace eulermax {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t seed_for_T(std::uint64_t seed, double T) {
  return splitmix64(seed ^ splitmix64(std::bit_cast<std::uint64_t>(T)));
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

double measure(const GoodSet& set) {
  double m = 0.0;
  for (const auto& iv : set) m += iv.hi - iv.lo;
  return m;
}

bool contains(const GoodSet& set, double h) {
  for (const auto& iv : set)
    if (iv.lo <= h && h <= iv.hi) return true;
  return false;
}

double DiscretizationParams::window_width(double T, double E, double y, double K) {
  return std::log(T) / (K * E * std::log(y));
}

DiscretizationParams discretize_good_set(const GoodSet& good_set, double E, double T, double y) {
  if (!(T > 1.0) || !(E > 0.0)) throw ParameterError("discretization needs T > 1 and E > 0");
  GoodSet sorted = good_set;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& iv = sorted[k];
    if (!(iv.lo >= 0.0 && iv.lo <= iv.hi && iv.hi <= kTwoPi))
      throw ParameterError("good set intervals must lie in [0, 2 pi]");
    if (k > 0 && iv.lo < sorted[k - 1].hi) throw ParameterError("good set intervals overlap");
  }
  const double logT = std::log(T);
  const double spacing = E / logT;
  const double meas = measure(sorted);
  if (!(meas > spacing)) throw ParameterError("good set measure must exceed E/log T");
  const double top = kTwoPi * logT / E - 1.0;
  if (top < 0.0) throw ParameterError("lattice z + iE/log T has no points in [0, 2 pi]");

  DiscretizationParams d;
  d.T = T;
  d.E = E;
  d.y = y;
  d.spacing = spacing;
  d.lattice_size = static_cast<std::size_t>(std::floor(top)) + 1;

  auto inside = [&](double h) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), h,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    return it != sorted.begin() && h <= std::prev(it)->hi;
  };
  std::size_t best = 0;
  double best_z = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double z = spacing * k / 64.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < d.lattice_size; ++i)
      if (inside(z + static_cast<double>(i) * spacing)) ++count;
    if (count > best) {
      best = count;
      best_z = z;
    }
  }
  const double bound = std::ceil(meas / spacing - 1.0 - 1e-9);
  if (static_cast<double>(best) < bound)
    throw ConstructionError("good set too fragmented: best scanned z gives " +
                            std::to_string(best) + " lattice points, averaging bound " +
                            std::to_string(static_cast<long long>(bound)));
  d.z = best_z;
  for (std::size_t i = 0; i < d.lattice_size; ++i) {
    const double h = d.h(i);
    if (inside(h)) {
      d.indices.push_back(i);
      d.Hstar.push_back(h);
    }
  }
  return d;
}

DiscretizationParams build_blocks(DiscretizationParams disc, double K, double T) {
  if (!(K > 0.0)) throw ParameterError("build_blocks needs K > 0");
  if (!(disc.y > 1.0)) throw ParameterError("build_blocks needs y > 1");
  const double w = DiscretizationParams::window_width(T, disc.E, disc.y, K);
  if (!(w > 0.0) || !std::isfinite(w)) throw ConstructionError("block windows have zero width");
  const double need = std::max(1.0, std::ceil(w / 2.0 - 1e-12));
  const auto j_max = static_cast<std::size_t>(std::floor(kTwoPi * K * std::log(disc.y)));
  const auto n_blocks = static_cast<std::size_t>(std::floor(std::log(disc.y)));
  if (n_blocks == 0) throw ParameterError("build_blocks needs log y >= 1");

  std::vector<std::vector<std::size_t>> qualifying;
  auto it = disc.indices.begin();
  for (std::size_t j = 0; j <= j_max; j += 2) {
    const double lo = static_cast<double>(j) * w;
    const double hi = static_cast<double>(j + 1) * w;
    it = std::lower_bound(it, disc.indices.end(), lo - 1e-9,
                          [](std::size_t i, double v) { return static_cast<double>(i) < v; });
    std::vector<std::size_t> members;
    for (auto m = it; m != disc.indices.end() && static_cast<double>(*m) <= hi + 1e-9; ++m)
      members.push_back(*m);
    if (static_cast<double>(members.size()) >= need) qualifying.push_back(std::move(members));
  }
  if (qualifying.size() < n_blocks)
    throw ConstructionError("only " + std::to_string(qualifying.size()) +
                            " even windows meet the block size " +
                            std::to_string(static_cast<long long>(need)) + "; need " +
                            std::to_string(n_blocks));
  disc.blocks.clear();
  for (std::size_t k = 0; k < n_blocks; ++k)
    disc.blocks.push_back(qualifying[k * qualifying.size() / n_blocks]);
  return disc;
}

double reference_upper(double T) { return log_log(T) - 0.25 * log_log_log(T); }
double reference_lower(double T) { return log_log(T) - 2.0 * log_log_log(T); }

void ExperimentConfig::validate() const {
  if (T_list.empty()) throw ParameterError("campaign needs at least one T");
  for (double T : T_list) {
    if (!std::isfinite(T) || !(T >= 3.0)) throw ParameterError("campaign T must be >= 3");
    if (scaled_parameters && T < 16.0)
      throw ParameterError("default parameters need T >= 16");
  }
  if (!(good_set_measure > 0.0 && good_set_measure <= kTwoPi))
    throw ParameterError("good_set_measure must lie in (0, 2 pi]");
  if (!(K_block > 0.0)) throw ParameterError("K_block must be positive");
  if (n_trials == 0) throw ParameterError("campaign needs at least one trial");
  if (!(model.grid_density > 0.0)) throw ParameterError("grid_density must be positive");
}

ModelParams ExperimentConfig::params_for(double T) const {
  ModelParams p = scaled_parameters ? ModelParams::scaled_defaults(T) : model;
  p.T = T;
  if (y) p.y = *y;
  if (E) p.E = *E;
  p.grid_density = model.grid_density;
  p.n_trials = n_trials;
  p.seed = seed;
  p.validate();
  return p;
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
  Histogram h;
  if (values.empty() || bins == 0) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.width = *mx > *mn ? (*mx - *mn) / static_cast<double>(bins) : 1.0;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lo) / h.width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::string out = "T,trial,max,argmax_h,restricted_max\n";
  for (const auto& r : records) {
    out += fmt17(r.T) + ',' + std::to_string(r.trial_index) + ',' + fmt17(r.max_value) + ',' +
           fmt17(r.argmax_h) + ',' + fmt17(r.restricted_max) + '\n';
  }
  return out;
}

std::string git_style_hash(const std::string& data) {
  const std::string blob = "blob " + std::to_string(data.size()) + '\0' + data;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw NumericalError("SHA-1 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

namespace {

nlohmann::json histogram_json(const Histogram& h) {
  return {{"lo", h.lo}, {"width", h.width}, {"counts", h.counts}};
}

nlohmann::json config_json(const ExperimentConfig& c) {
  return {{"T_list", c.T_list},
          {"scaled_parameters", c.scaled_parameters},
          {"y", c.y ? nlohmann::json(*c.y) : nlohmann::json(nullptr)},
          {"E", c.E ? nlohmann::json(*c.E) : nlohmann::json(nullptr)},
          {"grid_density", c.model.grid_density},
          {"variant", std::string(to_string(c.variant))},
          {"good_set_measure", c.good_set_measure},
          {"K_block", c.K_block},
          {"n_trials", c.n_trials},
          {"seed", c.seed}};
}

}  // namespace

CampaignResult run_max_campaign(const ExperimentConfig& config) {
  config.validate();
  const double T_top = *std::max_element(config.T_list.begin(), config.T_list.end());
  const auto limit = static_cast<std::uint64_t>(std::floor(T_top));
  const PrimeTable table =
      config.prime_cache.empty() ? sieve(limit) : cached_sieve(limit, config.prime_cache);

  CampaignResult res;
  for (double T : config.T_list) {
    const ModelParams p = config.params_for(T);
    const DiscretizationParams disc =
        discretize_good_set({{0.0, config.good_set_measure}}, p.E, T, p.y);
    const FieldTerms terms = make_field_terms(table, config.variant, T, 2.0, T);
    const std::size_t n_phases = terms.phases_needed();
    const FieldEvaluator on_grid(terms, full_circle_lattice(p.n_grid()));
    const FieldEvaluator on_lattice(terms, Lattice{disc.z, disc.spacing, disc.lattice_size});
    const std::uint64_t seed_T = seed_for_T(config.seed, T);

    std::vector<TrialRecord> recs(config.n_trials);
    parallel_for(config.n_trials, config.threads, [&](std::size_t k) {
      const PhaseVector ph = sample_phases(table, seed_T, k, n_phases);
      const auto grid = on_grid.evaluate(ph);
      const auto lat = on_lattice.evaluate(ph);
      const GridMax gm = lattice_max(grid, on_grid.lattice());
      double rmax = -std::numeric_limits<double>::infinity();
      std::size_t rarg = 0;
      for (std::size_t i : disc.indices) {
        if (lat[i] > rmax) {
          rmax = lat[i];
          rarg = i;
        }
      }
      TrialRecord& r = recs[k];
      r.T = T;
      r.trial_index = k;
      r.restricted_max = rmax;
      if (rmax > gm.value) {
        r.max_value = rmax;
        r.argmax_h = disc.h(rarg);
      } else {
        r.max_value = gm.value;
        r.argmax_h = gm.h_star;
      }
    });

    std::vector<double> mx(recs.size());
    std::vector<double> rx(recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k) {
      mx[k] = recs[k].max_value;
      rx[k] = recs[k].restricted_max;
    }
    CampaignSummary s;
    s.T = T;
    s.E = p.E;
    s.y = p.y;
    s.n_grid = p.n_grid();
    s.n_hstar = disc.indices.size();
    s.median = quantile(mx, 0.5);
    s.q05 = quantile(mx, 0.05);
    s.q95 = quantile(mx, 0.95);
    s.iqr = quantile(mx, 0.75) - quantile(mx, 0.25);
    s.restricted_median = quantile(rx, 0.5);
    s.restricted_q05 = quantile(rx, 0.05);
    s.restricted_q95 = quantile(rx, 0.95);
    s.L_up = reference_upper(T);
    s.L_low = reference_lower(T);
    s.max_histogram = make_histogram(mx);
    s.restricted_histogram = make_histogram(rx);
    res.per_T.push_back(s);
    res.records.insert(res.records.end(), recs.begin(), recs.end());
  }

  if (res.per_T.size() >= 2) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& s : res.per_T) {
      x.push_back(log_log(s.T));
      y.push_back(s.median);
    }
    res.slope = regression_slope(x, y);
    auto order = res.per_T;
    std::sort(order.begin(), order.end(),
              [](const CampaignSummary& a, const CampaignSummary& b) { return a.T < b.T; });
    const double rootn = std::sqrt(static_cast<double>(config.n_trials));
    for (std::size_t i = 1; i < order.size(); ++i) {
      const double allowance = 3.0 * std::max(order[i].iqr, order[i - 1].iqr) / rootn;
      if (order[i].median < order[i - 1].median - allowance) res.medians_monotone = false;
    }
  }

  const std::string csv = records_csv(res.records);
  const nlohmann::json cfg = config_json(config);
  res.run_hash = git_style_hash(cfg.dump() + '\n' + csv);

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    std::ofstream(config.output_dir / "records.csv", std::ios::binary) << csv;
    nlohmann::json per_T = nlohmann::json::array();
    for (const auto& s : res.per_T) {
      per_T.push_back({{"T", s.T},
                       {"E", s.E},
                       {"y", s.y},
                       {"n_grid", s.n_grid},
                       {"n_hstar", s.n_hstar},
                       {"median", s.median},
                       {"q05", s.q05},
                       {"q95", s.q95},
                       {"iqr", s.iqr},
                       {"restricted_median", s.restricted_median},
                       {"restricted_q05", s.restricted_q05},
                       {"restricted_q95", s.restricted_q95},
                       {"L_up", s.L_up},
                       {"L_low", s.L_low},
                       {"max_histogram", histogram_json(s.max_histogram)},
                       {"restricted_histogram", histogram_json(s.restricted_histogram)}});
    }
    nlohmann::json summary = {{"config", cfg},
                              {"per_T", per_T},
                              {"slope", res.slope},
                              {"medians_monotone", res.medians_monotone},
                              {"run_hash", res.run_hash}};
    std::ofstream(config.output_dir / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
  }
  return res;
}

std::uint64_t split_prime(const PrimeTable& table, double T) {
  const double cut = std::exp(std::log(T) / log_log(T));
  const auto p = table.largest_prime_upto(cut);
  if (!p) throw ParameterError("no prime below T^{1/log log T}");
  return *p;
}

ChainingReport chaining_diagnostics(const ModelParams& params, int k_max, std::size_t n_trials,
                                    const PrimeTable& table, unsigned threads) {
  if (k_max < 1 || k_max > 20) throw ParameterError("chaining needs 1 <= k_max <= 20");
  if (n_trials == 0) throw ParameterError("chaining needs at least one trial");
  params.validate();
  const double T = params.T;
  const double logT = std::log(T);
  const double ll = log_log(T);
  ChainingReport rep;
  rep.T = T;
  rep.n_trials = n_trials;
  rep.split = split_prime(table, T);
  const FieldTerms terms =
      make_field_terms(table, FieldVariant::shifted_V, T, 2.0, static_cast<double>(rep.split));
  const std::size_t top = std::size_t{1} << k_max;
  const FieldEvaluator ev(terms, Lattice{0.0, 1.0 / (static_cast<double>(top) * logT), top + 1});
  const std::size_t n_phases = terms.phases_needed();
  const auto K = static_cast<std::size_t>(k_max);

  std::vector<double> sumsq(n_trials * K);
  rep.records.resize(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    const auto v = ev.evaluate(sample_phases(table, params.seed, t, n_phases));
    TrialRecord& r = rep.records[t];
    const GridMax gm = lattice_max(v, ev.lattice());
    r.T = T;
    r.trial_index = t;
    r.max_value = gm.value;
    r.argmax_h = gm.h_star;
    r.restricted_max = v[0];
    r.per_scale_increments.assign(K, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
      const std::size_t stride = top >> k;
      double ss = 0.0;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i <= (std::size_t{1} << k); i += 2) {
        const double inc = v[i * stride] - v[(i - 1) * stride];
        ss += inc * inc;
        mx = std::max(mx, inc);
      }
      sumsq[t * K + k - 1] = ss;
      r.per_scale_increments[k - 1] = mx;
    }
  });

  for (std::size_t k = 1; k <= K; ++k) {
    ScaleReport s;
    s.k = static_cast<int>(k);
    s.n_increments = std::size_t{1} << (k - 1);
    CompensatedSum ss;
    for (std::size_t t = 0; t < n_trials; ++t) ss += sumsq[t * K + k - 1];
    s.variance = ss.value() / static_cast<double>(n_trials * s.n_increments);
    const double dh = 1.0 / (std::ldexp(1.0, static_cast<int>(k)) * logT);
    CompensatedSum ev;
    for (std::size_t i = 0; i < terms.size(); ++i)
      ev += terms.amplitude[i] * terms.amplitude[i] * (1.0 - std::cos(dh * terms.frequency[i]));
    s.exact_variance = ev.value();
    s.reference = 1.0 / std::pow(std::ldexp(ll, static_cast<int>(k)), 2);
    s.ratio = s.variance / s.reference;
    s.threshold = std::pow(static_cast<double>(k), 0.9) * std::ldexp(1.0, -static_cast<int>(k));
    for (const auto& r : rep.records)
      if (r.per_scale_increments[k - 1] > s.threshold) ++s.exceedances;
    s.exceedance_frequency = static_cast<double>(s.exceedances) / static_cast<double>(n_trials);
    rep.scales.push_back(s);
  }
  return rep;
}

std::string scales_csv(const ChainingReport& report) {
  std::string out =
      "k,n_increments,variance,exact_variance,reference,ratio,threshold,exceedances,"
      "exceedance_frequency\n";
  for (const auto& s : report.scales) {
    out += std::to_string(s.k) + ',' + std::to_string(s.n_increments) + ',' + fmt17(s.variance) +
           ',' + fmt17(s.exact_variance) + ',' + fmt17(s.reference) + ',' + fmt17(s.ratio) + ',' + fmt17(s.threshold) + ',' +
           std::to_string(s.exceedances) + ',' + fmt17(s.exceedance_frequency) + '\n';
  }
  return out;
}

SplitLevels split_levels(double T, double C) {
  if (!(C > 0.0)) throw ParameterError("three-event split needs C > 0");
  const double lll = log_log_log(T);
  if (!(lll > 0.0)) throw ParameterError("three-event split needs log log log T > 0");
  return {log_log(T) - 0.25 * lll + C * std::sqrt(lll), C, lll};
}

bool split_premise(const SplitInputs& in, const SplitLevels& lv, double slack) {
  return in.small0 + in.large_max > lv.u - slack;
}

unsigned classify_events(const SplitInputs& in, const SplitLevels& lv, double slack) {
  const double a = 0.5 * lv.C * lv.lll;
  const double b = 0.5 * lv.C * std::sqrt(lv.lll);
  unsigned ev = kEventNone;
  if (split_premise(in, lv, slack) && in.large_max > a) ev |= kEventLargeMax;
  const bool small_high = in.small0 > lv.u - slack - a;
  if (small_high && in.large_rise > b) ev |= kEventLargeRise;
  if (small_high && in.full0 > lv.u - b - slack) ev |= kEventFull;
  return ev;
}

double required_slack(const SplitInputs& in, const SplitLevels& lv) {
  const double a = 0.5 * lv.C * lv.lll;
  const double b = 0.5 * lv.C * std::sqrt(lv.lll);
  const double inf = std::numeric_limits<double>::infinity();
  const double s1 = in.large_max > a ? lv.u - in.small0 - in.large_max : inf;
  const double s2 = in.large_rise > b ? lv.u - a - in.small0 : inf;
  const double s3 = std::max(lv.u - a - in.small0, lv.u - b - in.full0);
  return std::max(0.0, std::min({s1, s2, s3}));
}

ThreeEventReport three_event_split_check(const ModelParams& params, double C,
                                         std::size_t n_trials, const PrimeTable& table,
                                         double slack, unsigned threads) {
  params.validate();
  if (n_trials == 0) throw ParameterError("three-event split needs at least one trial");
  if (!(slack >= 0.0)) throw ParameterError("slack must be non-negative");
  const double T = params.T;
  const double logT = std::log(T);
  const SplitLevels lv = split_levels(T, C);
  const auto split = static_cast<double>(split_prime(table, T));
  if (!(split < T)) throw ParameterError("three-event split needs primes above the split");

  const int k_split = static_cast<int>(std::floor(lv.lll));
  const int k_fine = std::max(k_split, std::min(12, static_cast<int>(std::floor(logT))));
  const std::size_t top = std::size_t{1} << k_fine;
  const std::size_t stride = top >> k_split;
  const Lattice fine{0.0, 1.0 / (static_cast<double>(top) * logT), top + 1};
  const FieldTerms small_terms = make_field_terms(table, FieldVariant::shifted_V, T, 2.0, split);
  const FieldTerms large_terms =
      make_field_terms(table, FieldVariant::shifted_V, T, split + 1.0, T);
  const std::size_t n_phases = large_terms.phases_needed();
  const FieldEvaluator small_ev(small_terms, fine);
  const FieldEvaluator large_ev(large_terms, fine);

  std::vector<SplitInputs> inputs(n_trials);
  std::vector<double> fine_max(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    const PhaseVector ph = sample_phases(table, params.seed, t, n_phases);
    const auto s = small_ev.evaluate(ph);
    const auto l = large_ev.evaluate(ph);
    SplitInputs& in = inputs[t];
    in.small0 = s[0];
    in.full0 = s[0] + l[0];
    in.large_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= top; j += stride) in.large_max = std::max(in.large_max, l[j]);
    in.large_rise = in.large_max - l[0];
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= top; ++j) m = std::max(m, s[j] + l[j]);
    fine_max[t] = m;
  });

  ThreeEventReport rep;
  rep.T = T;
  rep.C = C;
  rep.slack = slack;
  rep.u = lv.u;
  rep.n_trials = n_trials;
  for (std::size_t t = 0; t < n_trials; ++t) {
    const SplitInputs& in = inputs[t];
    const unsigned ev = classify_events(in, lv, slack);
    for (int e = 0; e < 3; ++e)
      if (ev & (1u << e)) ++rep.event_counts[e];
    if (split_premise(in, lv, slack)) {
      ++rep.n_premise;
      if (ev == kEventNone) ++rep.violations;
    }
    if (fine_max[t] > lv.u) ++rep.n_fine_exceed;
    // The slack needed is largest at the highest level the trial reaches.
    SplitLevels at = lv;
    at.u = fine_max[t];
    rep.min_slack = std::max(rep.min_slack, required_slack(in, at));
  }
  return rep;
}

std::vector<LagEstimate> empirical_lag_covariance(const PrimeTable& table, double T, double P,
                                                  double Q, const Lattice& lags,
                                                  std::size_t n_trials, std::uint64_t seed,
                                                  unsigned threads) {
  if (lags.count == 0 || n_trials < 2)
    throw ParameterError("empirical covariance needs lags and 2+ trials");
  const FieldTerms terms = make_field_terms(table, FieldVariant::plain_X, T, P, Q);
  const FieldEvaluator ev(terms, lags);
  const std::size_t n_phases = terms.phases_needed();
  const std::size_t m = lags.count;
  std::vector<double> values(n_trials * m);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    const auto v = ev.evaluate(sample_phases(table, seed, t, n_phases));
    std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(t * m));
  });
  std::vector<LagEstimate> out(m);
  std::vector<double> prod(n_trials);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t t = 0; t < n_trials; ++t) prod[t] = values[t * m] * values[t * m + j];
    out[j] = {mean(prod), std::sqrt(variance(prod) / static_cast<double>(n_trials))};
  }
  return out;
}

std::vector<EmpiricalCovarianceRow> empirical_covariance(const PrimeTable& table, double T,
                                                         double P, double Q,
                                                         std::size_t n_grid,
                                                         std::size_t n_trials,
                                                         std::uint64_t seed, unsigned threads) {
  if (n_grid < 2 || n_trials < 2)
    throw ParameterError("empirical covariance needs 2+ grid points and 2+ trials");
  const FieldTerms terms = make_field_terms(table, FieldVariant::plain_X, T, P, Q);
  const FieldEvaluator ev(terms, full_circle_lattice(n_grid));
  const std::size_t n_phases = terms.phases_needed();
  std::vector<double> values(n_trials * n_grid);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    const auto v = ev.evaluate(sample_phases(table, seed, t, n_phases));
    std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(t * n_grid));
  });

  const CovarianceSpec spec{P, Q, T, &table};
  const double step = ev.lattice().step;
  const std::size_t half = n_grid / 2;
  const double n = static_cast<double>(n_trials);
  std::vector<EmpiricalCovarianceRow> rows;
  std::vector<double> prod(n_trials);
  auto estimate = [&](std::size_t a, std::size_t b, double& m, double& se) {
    for (std::size_t t = 0; t < n_trials; ++t)
      prod[t] = values[t * n_grid + a] * values[t * n_grid + b];
    m = mean(prod);
    se = std::sqrt(variance(prod) / n);
  };
  for (std::size_t d = 0; d < half; ++d) {
    EmpiricalCovarianceRow r;
    r.lag = d;
    r.dh = static_cast<double>(d) * step;
    r.exact = exact_covariance(spec, r.dh);
    estimate(0, d, r.empirical, r.standard_error);
    estimate(half, half + d, r.shifted, r.shifted_error);
    rows.push_back(r);
  }
  return rows;
}

SurrogateComparison surrogate_comparison(const DiscretizationParams& disc,
                                         const PrimeTable& table, std::size_t n_trials,
                                         std::uint64_t seed, unsigned threads) {
  if (disc.Hstar.empty()) throw ParameterError("surrogate comparison needs a non-empty H*");
  if (n_trials == 0) throw ParameterError("surrogate comparison needs trials");
  const CorrelationFunction corr(CovarianceSpec{disc.y, disc.T, disc.T, &table});
  const CovMatrix matrix = build_cov_matrix(corr, disc.Hstar);
  const double scale = 1.0 / std::sqrt(corr.normalization());

  const FieldTerms terms = make_field_terms(table, FieldVariant::plain_X, disc.T, disc.y, disc.T);
  const FieldEvaluator ev(terms, Lattice{disc.z, disc.spacing, disc.lattice_size});
  const std::size_t n_phases = terms.phases_needed();

  SurrogateComparison out;
  out.n_points = disc.Hstar.size();
  out.jitter = matrix.jitter();
  out.euler_max.resize(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    const auto v = ev.evaluate(sample_phases(table, seed, t, n_phases));
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i : disc.indices) m = std::max(m, v[i]);
    out.euler_max[t] = m * scale;
  });
  const GaussianSamples g = sample_gaussian_field(matrix, seed, n_trials, threads);
  out.gaussian_max.resize(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) out.gaussian_max[t] = max_of(g.trial(t));
  out.ks = ks_distance(out.euler_max, out.gaussian_max);
  return out;
}

LowerBoundRow lower_bound_check(const CorrelationFunction& corr, double u, std::size_t n,
                                double spacing, std::size_t n_trials, std::uint64_t seed,
                                unsigned threads) {
  if (n == 0 || !(spacing > 0.0) || n_trials == 0)
    throw ParameterError("lower bound check needs n >= 1, spacing > 0 and trials");
  if (static_cast<double>(n - 1) * spacing >= kTwoPi)
    throw ParameterError("lower bound grid must fit inside [0, 2 pi)");
  std::vector<double> r(n - 1);
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = static_cast<double>(i) * spacing;
  for (std::size_t j = 1; j < n; ++j) r[j - 1] = corr(static_cast<double>(j) * spacing);

  LowerBoundRow row;
  row.u = u;
  row.n = n;
  row.spacing = spacing;
  row.bound = lower_bound_1(r, u, n, n);
  const GaussianSamples g = sample_gaussian_field(build_cov_matrix(corr, pts), seed, n_trials,
                                                  threads);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < n_trials; ++t)
    if (max_of(g.trial(t)) > u) ++hits;
  const double N = static_cast<double>(n_trials);
  row.empirical = static_cast<double>(hits) / N;
  row.standard_error = std::sqrt(row.empirical * (1.0 - row.empirical) / N);
  return row;
}

ComparisonReport block_comparison(const DiscretizationParams& disc, const CorrelationFunction& corr,
                                  double u, std::size_t n_trials, std::uint64_t seed,
                                  unsigned threads, bool same_law) {
  if (disc.blocks.empty()) throw ParameterError("block comparison needs blocks");
  if (n_trials == 0) throw ParameterError("block comparison needs trials");
  std::vector<double> pts;
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < disc.blocks.size(); ++b) {
    for (std::size_t i : disc.blocks[b]) {
      pts.push_back(disc.h(i));
      block_of.push_back(b);
    }
  }
  const CovMatrix cov1 = build_cov_matrix(corr, pts);
  std::vector<double> e0 = cov1.entries();
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!same_law && block_of[i] != block_of[j]) e0[i * n + j] = 0.0;
  const CovMatrix cov0(pts, std::move(e0));
  const std::vector<double> thresholds(n, u);

  ComparisonReport rep;
  rep.n_points = n;
  rep.n_blocks = disc.blocks.size();
  rep.u = u;
  rep.bound = li_shao_bound(cov1, cov0, thresholds);
  auto below = [&](const GaussianSamples& g) {
    std::size_t c = 0;
    for (std::size_t t = 0; t < n_trials; ++t)
      if (max_of(g.trial(t)) <= u) ++c;
    return static_cast<double>(c) / static_cast<double>(n_trials);
  };
  rep.p_joint = below(sample_gaussian_field(cov1, seed, n_trials, threads));
  rep.p_product = below(sample_gaussian_field(cov0, splitmix64(seed), n_trials, threads));
  const double N = static_cast<double>(n_trials);
  rep.standard_error = std::sqrt(rep.p_joint * (1.0 - rep.p_joint) / N +
                                 rep.p_product * (1.0 - rep.p_product) / N);
  return rep;
}

TailReport talagrand_tail_check(const PrimeTable& table, double T, double p_min,
                                std::size_t n_trials, std::uint64_t seed,
                                const std::vector<double>& t_over_sigma, double c_big_oh,
                                unsigned threads) {
  if (n_trials == 0) throw ParameterError("tail check needs trials");
  const TailBoundInputs in = v_sum_tail_inputs(table, T, p_min);
  const FieldTerms terms = make_field_terms(table, FieldVariant::shifted_V, T, p_min, T);
  const std::size_t n_phases = terms.phases_needed();
  std::vector<double> S(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    std::vector<double> re;
    std::vector<double> im;
    field_coefficients(terms, sample_phases(table, seed, t, n_phases), re, im);
    CompensatedSum s;
    for (double c : re) s += c;
    S[t] = s.value();
  });
  std::sort(S.begin(), S.end());
  const double N = static_cast<double>(n_trials);
  auto survival = [&](double t) {
    const auto above = S.end() - std::upper_bound(S.begin(), S.end(), t);
    return static_cast<double>(above) / N;
  };

  TailReport rep;
  rep.sigma2 = in.sigma2;
  rep.B = in.B;
  rep.third_moment_sum = in.third_moment_sum;
  const double sigma = std::sqrt(in.sigma2);
  rep.calibration = survival(sigma) / talagrand_bound(in, sigma, c_big_oh);
  for (double x : t_over_sigma) {
    TailRow r;
    r.t = x * sigma;
    r.empirical = survival(r.t);
    r.standard_error = std::sqrt(r.empirical * (1.0 - r.empirical) / N);
    r.gaussian_log = -0.5 * x * x;
    r.bound = rep.calibration * talagrand_bound(in, r.t, c_big_oh);
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace eulermax
