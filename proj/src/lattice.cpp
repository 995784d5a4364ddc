#include "eulermax/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eulermax/numeric.hpp"

namespace eulermax {

namespace {

constexpr std::size_t kLanes = 32;
constexpr std::size_t kAccLanes = 8;

struct alignas(64) LaneBlock {
  double zr[kLanes];
  double zi[kLanes];
  double wr[kLanes];
  double wi[kLanes];
};

}  // namespace

RotationPlan::RotationPlan(std::vector<double> frequencies, Lattice lattice)
    : frequencies_(std::move(frequencies)), lattice_(lattice) {
  const std::size_t n = frequencies_.size();
  start_re_.resize(n);
  start_im_.resize(n);
  step_re_.resize(n);
  step_im_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = frequencies_[k];
    start_re_[k] = std::cos(lattice_.start * f);
    start_im_[k] = -std::sin(lattice_.start * f);
    step_re_[k] = std::cos(lattice_.step * f);
    step_im_[k] = -std::sin(lattice_.step * f);
  }
}

void RotationPlan::accumulate(std::span<const double> coef_re, std::span<const double> coef_im,
                              std::span<double> out) const {
  const std::size_t n = frequencies_.size();
  const std::size_t count = lattice_.count;
  if (coef_re.size() != n || coef_im.size() != n)
    throw std::invalid_argument("RotationPlan: coefficient count mismatch");
  if (out.size() != count) throw std::invalid_argument("RotationPlan: output size mismatch");
  if (n == 0 || count == 0) return;

  std::vector<double> partial(count * kAccLanes, 0.0);
  LaneBlock blk{};

  for (std::size_t base = 0; base < n; base += kLanes) {
    const std::size_t width = std::min(kLanes, n - base);
    for (std::size_t l = 0; l < kLanes; ++l) {
      if (l < width) {
        const std::size_t k = base + l;
        blk.zr[l] = coef_re[k] * start_re_[k] - coef_im[k] * start_im_[k];
        blk.zi[l] = coef_re[k] * start_im_[k] + coef_im[k] * start_re_[k];
        blk.wr[l] = step_re_[k];
        blk.wi[l] = step_im_[k];
      } else {
        blk.zr[l] = blk.zi[l] = 0.0;
        blk.wr[l] = 1.0;
        blk.wi[l] = 0.0;
      }
    }

    for (std::size_t seg = 0; seg < count; seg += kResetInterval) {
      if (seg > 0) {
        const double h = lattice_.at(seg);
        for (std::size_t l = 0; l < width; ++l) {
          const std::size_t k = base + l;
          const double c = std::cos(h * frequencies_[k]);
          const double s = -std::sin(h * frequencies_[k]);
          blk.zr[l] = coef_re[k] * c - coef_im[k] * s;
          blk.zi[l] = coef_re[k] * s + coef_im[k] * c;
        }
      }
      const std::size_t seg_end = std::min(count, seg + kResetInterval);
      for (std::size_t j = seg; j < seg_end; ++j) {
        double* acc = partial.data() + j * kAccLanes;
        for (std::size_t l = 0; l < kAccLanes; ++l) {
          acc[l] += (blk.zr[l] + blk.zr[l + 8]) + (blk.zr[l + 16] + blk.zr[l + 24]);
        }
        for (std::size_t l = 0; l < kLanes; ++l) {
          const double nr = blk.zr[l] * blk.wr[l] - blk.zi[l] * blk.wi[l];
          const double ni = blk.zr[l] * blk.wi[l] + blk.zi[l] * blk.wr[l];
          blk.zr[l] = nr;
          blk.zi[l] = ni;
        }
      }
    }
  }

  for (std::size_t j = 0; j < count; ++j) {
    const double* acc = partial.data() + j * kAccLanes;
    double s = 0.0;
    for (std::size_t l = 0; l < kAccLanes; ++l) s += acc[l];
    out[j] += s;
  }
}

std::vector<double> RotationPlan::evaluate(std::span<const double> coef_re,
                                           std::span<const double> coef_im) const {
  std::vector<double> out(lattice_.count, 0.0);
  accumulate(coef_re, coef_im, out);
  return out;
}

double direct_trig_sum(std::span<const double> coef_re, std::span<const double> coef_im,
                       std::span<const double> frequencies, double h) {
  CompensatedSum s;
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    const double a = h * frequencies[k];
    s += coef_re[k] * std::cos(a) + coef_im[k] * std::sin(a);
  }
  return s.value();
}

}  // namespace eulermax
