#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eulermax {

// Uniform points start + i*step, 0 <= i < count.
struct Lattice {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double at(std::size_t i) const noexcept { return start + static_cast<double>(i) * step; }
};

// Evaluates trigonometric sums  S(h) = Re sum_k c_k exp(-i h f_k)  on a
// lattice. Per frequency the phase is advanced by the rotation recurrence
// z <- z * exp(-i step f), recomputed exactly every kResetInterval steps, so
// the inner loop has no transcendental calls. Construction precomputes the
// per-frequency start and step rotations; a plan can then be applied to many
// coefficient vectors (one per Monte Carlo trial).
class RotationPlan {
 public:
  static constexpr std::size_t kResetInterval = 1024;

  RotationPlan(std::vector<double> frequencies, Lattice lattice);

  const Lattice& lattice() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return frequencies_.size(); }
  std::span<const double> frequencies() const noexcept { return frequencies_; }

  // out[j] += S(h_j). out must have lattice().count entries; coefficient
  // spans must have size() entries.
  void accumulate(std::span<const double> coef_re, std::span<const double> coef_im,
                  std::span<double> out) const;

  std::vector<double> evaluate(std::span<const double> coef_re,
                               std::span<const double> coef_im) const;

 private:
  std::vector<double> frequencies_;
  Lattice lattice_;
  std::vector<double> start_re_, start_im_;
  std::vector<double> step_re_, step_im_;
};

// Direct evaluation with one cos/sin pair per term; the reference the
// recurrence is checked against.
double direct_trig_sum(std::span<const double> coef_re, std::span<const double> coef_im,
                       std::span<const double> frequencies, double h);

}  // namespace eulermax
