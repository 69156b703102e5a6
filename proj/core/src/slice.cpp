#include "bnprdd/slice.hpp"

#include <cmath>
#include <string>

#include "bnprdd/error.hpp"

namespace bnprdd {

double slice_sample(double x0, const std::function<double(double)>& log_density, RandomStream& rng,
                    const SliceOptions& options) {
  const double lower = options.lower;
  const double upper = options.upper;
  auto inside = [&](double x) { return x > lower && x < upper; };
  auto logf = [&](double x) {
    return inside(x) ? log_density(x) : -std::numeric_limits<double>::infinity();
  };

  const double f0 = logf(x0);
  if (!std::isfinite(f0)) {
    throw NumericalError("slice_sample: log density at the current point is " + std::to_string(f0) +
                         " (x = " + std::to_string(x0) + ")");
  }
  const double level = f0 + std::log(rng.uniform());

  double left = x0 - options.width * rng.uniform();
  double right = left + options.width;
  int j = static_cast<int>(std::floor(options.max_steps * rng.uniform()));
  int k = options.max_steps - 1 - j;
  while (j > 0 && left > lower && logf(left) > level) {
    left -= options.width;
    --j;
  }
  while (k > 0 && right < upper && logf(right) > level) {
    right += options.width;
    --k;
  }
  if (left < lower) left = lower;
  if (right > upper) right = upper;

  for (int it = 0; it < 10000; ++it) {
    const double x = left + (right - left) * rng.uniform();
    if (inside(x) && logf(x) > level) return x;
    if (x < x0) {
      left = x;
    } else {
      right = x;
    }
    if (!(right > left)) break;
  }
  // Shrinkage collapsed onto x0 (only under pathological rounding).
  return x0;
}

}  // namespace bnprdd
