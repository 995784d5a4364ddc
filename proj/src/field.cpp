#include "eulermax/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eulermax/error.hpp"
#include "eulermax/numeric.hpp"
#include "eulermax/rng.hpp"

namespace eulermax {

PhaseVector sample_phases(const PrimeTable& table, std::uint64_t seed, std::uint64_t trial_index,
                          std::size_t count) {
  if (table.empty()) throw ParameterError("sample_phases needs a non-empty prime table");
  const std::size_t n = count == 0 ? table.size() : std::min(count, table.size());
  PhaseVector v;
  v.seed = seed;
  v.trial_index = trial_index;
  v.table = &table;
  v.re.resize(n);
  v.im.resize(n);
  const CounterRng rng(seed, Stream::phases);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform(trial_index, i);
    v.re[i] = std::cos(angle);
    v.im[i] = std::sin(angle);
  }
  return v;
}

std::string_view to_string(FieldVariant v) noexcept {
  return v == FieldVariant::plain_X ? "plain_X" : "shifted_V";
}

FieldVariant parse_field_variant(std::string_view s) {
  if (s == "plain_X" || s == "X" || s == "x") return FieldVariant::plain_X;
  if (s == "shifted_V" || s == "V" || s == "v") return FieldVariant::shifted_V;
  throw ParameterError("unknown field variant '" + std::string(s) + "'");
}

double log_log(double x) { return std::log(std::log(x)); }
double log_log_log(double x) { return std::log(std::log(std::log(x))); }

void ModelParams::validate() const {
  if (!(T > 2.0) || !std::isfinite(T)) throw ParameterError("T must be finite and > 2");
  if (!(y >= 2.0 && y <= T)) throw ParameterError("y must satisfy 2 <= y <= T");
  if (!(E >= 1.0) || !std::isfinite(E)) throw ParameterError("E must be >= 1");
  if (!(grid_density >= 1.0) || !std::isfinite(grid_density))
    throw ParameterError("grid_density must be >= 1");
  if (n_trials < 1) throw ParameterError("n_trials must be >= 1");
}

std::size_t ModelParams::n_grid() const {
  return static_cast<std::size_t>(std::ceil(grid_density * 2.0 * std::numbers::pi * std::log(T)));
}

ModelParams ModelParams::scaled_defaults(double T) {
  if (!(T > 15.0) || !std::isfinite(T) || !(log_log_log(T) > 0.0))
    throw ParameterError("default parameters need T > e^e (about 15.15); supply y and E");
  const double ll = log_log(T);
  const double lll = log_log_log(T);
  ModelParams p;
  p.T = T;
  p.E = std::max(1.0, std::sqrt(ll) * lll * lll);
  p.y = std::clamp(std::exp(ll * ll * lll * lll), 2.0, T);
  return p;
}

std::size_t FieldTerms::phases_needed() const noexcept {
  std::size_t n = 0;
  for (std::uint32_t i : prime_index) n = std::max<std::size_t>(n, std::size_t{i} + 1);
  return n;
}

FieldTerms make_field_terms(const PrimeTable& table, FieldVariant variant, double T, double P,
                            double Q) {
  if (!(P >= 2.0)) throw ParameterError("field needs P >= 2");
  if (P > Q) throw ParameterError("field needs P <= Q");
  if (Q > T) throw ParameterError("field needs Q <= T");
  if (std::floor(Q) > static_cast<double>(table.limit()))
    throw ParameterError("prime table limit " + std::to_string(table.limit()) + " below Q");

  FieldTerms t;
  t.T = T;
  t.P = P;
  t.Q = Q;
  t.variant = variant;
  const double logT = std::log(T);
  const auto [first, last] = table.index_range(P, Q);
  const auto logs = table.log_p();
  const auto isq = table.inv_sqrt_p();
  const std::size_t n = last - first;
  t.amplitude.reserve(2 * n);
  t.frequency.reserve(2 * n);
  t.prime_index.reserve(2 * n);
  t.power.reserve(2 * n);

  for (std::size_t i = first; i < last; ++i) {
    const double lp = logs[i];
    double a = isq[i] * (logT - lp) / logT;
    if (variant == FieldVariant::shifted_V) a *= std::exp(-lp / logT);
    t.amplitude.push_back(a);
    t.frequency.push_back(lp);
    t.prime_index.push_back(static_cast<std::uint32_t>(i));
    t.power.push_back(1);
  }
  if (variant == FieldVariant::shifted_V) {
    for (std::size_t i = first; i < last; ++i) {
      const double lp = logs[i];
      if (2.0 * lp > logT) break;
      const double a = 0.5 * isq[i] * isq[i] * std::exp(-2.0 * lp / logT) * (logT - 2.0 * lp) / logT;
      t.amplitude.push_back(a);
      t.frequency.push_back(2.0 * lp);
      t.prime_index.push_back(static_cast<std::uint32_t>(i));
      t.power.push_back(2);
    }
  }
  return t;
}

void field_coefficients(const FieldTerms& terms, const PhaseVector& phases,
                        std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = terms.size();
  if (n > 0 && phases.size() < terms.phases_needed())
    throw ParameterError("phase vector shorter than the field's prime range");
  re.resize(n);
  im.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = terms.prime_index[k];
    double ur = phases.re[i];
    double ui = phases.im[i];
    if (terms.power[k] == 2) {
      const double r2 = ur * ur - ui * ui;
      ui = 2.0 * ur * ui;
      ur = r2;
    }
    re[k] = terms.amplitude[k] * ur;
    im[k] = terms.amplitude[k] * ui;
  }
}

FieldEvaluator::FieldEvaluator(FieldTerms terms, Lattice lattice)
    : terms_(std::move(terms)), plan_(terms_.frequency, lattice) {}

std::vector<double> FieldEvaluator::evaluate(const PhaseVector& phases) const {
  std::vector<double> re;
  std::vector<double> im;
  field_coefficients(terms_, phases, re, im);
  return plan_.evaluate(re, im);
}

FieldGrid FieldEvaluator::evaluate_grid(const PhaseVector& phases) const {
  FieldGrid g;
  g.T = terms_.T;
  g.P = terms_.P;
  g.Q = terms_.Q;
  g.variant = terms_.variant;
  g.lattice = plan_.lattice();
  g.values = evaluate(phases);
  return g;
}

namespace {

const PrimeTable& table_of(const PhaseVector& phases) {
  if (phases.table == nullptr) throw ParameterError("phase vector has no prime table");
  return *phases.table;
}

}  // namespace

FieldGrid evaluate_X(const PhaseVector& phases, const ModelParams& params, double P, double Q) {
  return evaluate_X(phases, params, P, Q, full_circle_lattice(params.n_grid()));
}

FieldGrid evaluate_X(const PhaseVector& phases, const ModelParams& params, double P, double Q,
                     const Lattice& lattice) {
  const FieldEvaluator ev(
      make_field_terms(table_of(phases), FieldVariant::plain_X, params.T, P, Q), lattice);
  return ev.evaluate_grid(phases);
}

FieldGrid evaluate_V(const PhaseVector& phases, const ModelParams& params) {
  return evaluate_V(phases, params, full_circle_lattice(params.n_grid()));
}

FieldGrid evaluate_V(const PhaseVector& phases, const ModelParams& params, const Lattice& lattice) {
  const FieldEvaluator ev(
      make_field_terms(table_of(phases), FieldVariant::shifted_V, params.T, 2.0, params.T),
      lattice);
  return ev.evaluate_grid(phases);
}

double evaluate_field_direct(const FieldTerms& terms, const PhaseVector& phases, double h) {
  std::vector<double> re;
  std::vector<double> im;
  field_coefficients(terms, phases, re, im);
  return direct_trig_sum(re, im, terms.frequency, h);
}

GridMax lattice_max(std::span<const double> values, const Lattice& lattice) {
  if (values.empty()) throw ParameterError("maximum of an empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return {lattice.at(best), values[best], best};
}

GridMax grid_max(const FieldGrid& grid) { return lattice_max(grid.values, grid.lattice); }

double lipschitz_constant(const FieldTerms& terms) {
  CompensatedSum s;
  for (std::size_t k = 0; k < terms.size(); ++k) s += std::abs(terms.amplitude[k]) * terms.frequency[k];
  return s.value();
}

}  // namespace eulermax
