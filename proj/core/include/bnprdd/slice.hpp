#pragma once

#include <functional>
#include <limits>

#include "bnprdd/rng.hpp"

namespace bnprdd {

/// Univariate slice sampling with stepping-out and shrinkage (Neal 2003).
/// The target is given by its log density up to a constant; support may be
/// restricted to the open interval (lower, upper), and no proposal is ever
/// evaluated outside it.
struct SliceOptions {
  double width = 1.0;
  int max_steps = 50;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Throws NumericalError if log_density(x0) is not finite.
double slice_sample(double x0, const std::function<double(double)>& log_density, RandomStream& rng,
                    const SliceOptions& options = {});

}  // namespace bnprdd
