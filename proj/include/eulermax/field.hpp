#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eulermax/lattice.hpp"
#include "eulermax/primes.hpp"

namespace eulermax {

// One unit-circle phase U_p per prime of a table, a pure function of
// (seed, trial_index, prime index).
struct PhaseVector {
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
  const PrimeTable* table = nullptr;
  std::vector<double> re;
  std::vector<double> im;

  std::size_t size() const noexcept { return re.size(); }
};

// Draws U_p = exp(2 pi i u_p) for the first `count` primes of the table
// (all of them when count is 0).
PhaseVector sample_phases(const PrimeTable& table, std::uint64_t seed, std::uint64_t trial_index,
                          std::size_t count = 0);

enum class FieldVariant {
  plain_X,    // Re sum U_p p^{-1/2-ih} log(T/p)/log T
  shifted_V,  // Re sum V(p,h)/sqrt(p): p^{-1/log T} shift plus prime squares
};

std::string_view to_string(FieldVariant v) noexcept;
FieldVariant parse_field_variant(std::string_view s);

struct ModelParams {
  double T = 0.0;
  double y = 2.0;             // small-prime cutoff
  double E = 1.0;             // lattice coarsening
  double grid_density = 8.0;  // grid points per window of length 1/log T
  std::size_t n_trials = 1;
  std::uint64_t seed = 0;

  // Checks 2 <= y <= T, E >= 1, grid_density >= 1, n_trials >= 1.
  void validate() const;

  // ceil(grid_density * 2 pi * log T) points over [0, 2 pi).
  std::size_t n_grid() const;

  // E = sqrt(log log T) (log log log T)^2 floored at 1, and
  // log y = (log log T)^2 (log log log T)^2. Rejects T <= 15.
  static ModelParams scaled_defaults(double T);
};

// loglog and logloglog helpers used throughout.
double log_log(double x);
double log_log_log(double x);

// Sampled field on a lattice in h.
struct FieldGrid {
  double T = 0.0;
  double P = 0.0;
  double Q = 0.0;
  FieldVariant variant = FieldVariant::plain_X;
  Lattice lattice;
  std::vector<double> values;

  double h(std::size_t i) const noexcept { return lattice.at(i); }
};

inline Lattice full_circle_lattice(std::size_t n_grid) {
  return Lattice{0.0, 2.0 * 3.14159265358979323846 / static_cast<double>(n_grid), n_grid};
}

// Deterministic part of a field: one term per prime (and per prime square
// for the V variant), each contributing Re(amplitude * U_p^power * exp(-i h f)).
struct FieldTerms {
  double T = 0.0;
  double P = 0.0;
  double Q = 0.0;
  FieldVariant variant = FieldVariant::plain_X;
  std::vector<double> amplitude;
  std::vector<double> frequency;
  std::vector<std::uint32_t> prime_index;
  std::vector<std::uint8_t> power;

  std::size_t size() const noexcept { return amplitude.size(); }
  // Number of leading primes whose phases the terms read.
  std::size_t phases_needed() const noexcept;
};

// plain_X: primes P <= p <= Q with amplitude p^{-1/2} log(T/p)/log T.
// shifted_V: primes P <= p <= Q with amplitude p^{-1/2-1/log T} log(T/p)/log T,
// plus, for those p with p^2 <= T, amplitude (1/2) p^{-1-2/log T}
// log(T/p^2)/log T at frequency 2 log p.
FieldTerms make_field_terms(const PrimeTable& table, FieldVariant variant, double T, double P,
                            double Q);

// Complex coefficients amplitude * U^power for one trial.
void field_coefficients(const FieldTerms& terms, const PhaseVector& phases,
                        std::vector<double>& re, std::vector<double>& im);

// Evaluates a field for many trials on fixed lattices; the per-term rotation
// tables are computed once.
class FieldEvaluator {
 public:
  FieldEvaluator(FieldTerms terms, Lattice lattice);

  const FieldTerms& terms() const noexcept { return terms_; }
  const Lattice& lattice() const noexcept { return plan_.lattice(); }

  std::vector<double> evaluate(const PhaseVector& phases) const;
  FieldGrid evaluate_grid(const PhaseVector& phases) const;

 private:
  FieldTerms terms_;
  RotationPlan plan_;
};

// X_{P,Q}(h) on the params' full-circle grid. Throws ParameterError unless
// 2 <= P <= Q <= T.
FieldGrid evaluate_X(const PhaseVector& phases, const ModelParams& params, double P, double Q);
FieldGrid evaluate_X(const PhaseVector& phases, const ModelParams& params, double P, double Q,
                     const Lattice& lattice);

// Re sum_{p <= T} V(p,h)/sqrt(p) on the params' full-circle grid.
FieldGrid evaluate_V(const PhaseVector& phases, const ModelParams& params);
FieldGrid evaluate_V(const PhaseVector& phases, const ModelParams& params, const Lattice& lattice);

// Direct per-point evaluation of the same field, for cross-checks.
double evaluate_field_direct(const FieldTerms& terms, const PhaseVector& phases, double h);

struct GridMax {
  double h_star = 0.0;
  double value = 0.0;
  std::size_t index = 0;
};

// Largest value; ties resolve to the smallest h.
GridMax grid_max(const FieldGrid& grid);
GridMax lattice_max(std::span<const double> values, const Lattice& lattice);

// sum over terms of |amplitude| * frequency: a Lipschitz constant in h.
double lipschitz_constant(const FieldTerms& terms);

}  // namespace eulermax
