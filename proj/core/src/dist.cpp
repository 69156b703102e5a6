#include "bnprdd/dist.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bnprdd/error.hpp"

namespace bnprdd {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490392848;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398614;

// Beyond this many standard deviations the inverse-CDF route loses
// precision and the truncated sampler switches to rejection.
constexpr double kTailCut = 6.0;

// Wichura's AS241 (PPND16) rational approximations.
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
            45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
         133.14166789178437745) * r + 3.387132872796366608;
    const double den =
        ((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
            21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
         42.313330701600911252) * r + 1.0;
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
            1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
         4.6303378461565452959) * r + 1.42343711074968357734;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
            0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
         2.05319162663775882187) * r + 1.0;
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
            0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
         5.4637849111641143699) * r + 6.6579046435011037772;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
            7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
         0.59983220655588793769) * r + 1.0;
    x = num / den;
  }
  return q < 0.0 ? -x : x;
}

// Standard normal restricted to (a, b] with a > kTailCut. Robert (1995)
// exponential proposal, or a uniform proposal when the slab is thin.
double upper_tail_truncated(double a, double b, RandomStream& rng) {
  if (std::isfinite(b) && (b - a) * a <= 1.0) {
    for (;;) {
      const double x = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) <= -0.5 * (x * x - a * a)) return x;
    }
  }
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a - std::log(rng.uniform()) / rate;
    if (x > b) continue;
    const double d = x - rate;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
  }
}

double standard_truncated(double a, double b, RandomStream& rng) {
  if (a > kTailCut) return upper_tail_truncated(a, b, rng);
  if (b < -kTailCut) return -upper_tail_truncated(-b, -a, rng);

  // Work on the side of zero where the CDF keeps its relative precision.
  if (a >= 0.0) {
    const double pa = normal_ccdf(a);
    const double pb = normal_ccdf(b);
    if (pa - pb <= 1e-12 * pa) return a + (b - a) * rng.uniform();
    const double u = pb + (pa - pb) * rng.uniform();
    return -normal_quantile(u);
  }
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  if (pb - pa <= 1e-12 * pb) return a + (b - a) * rng.uniform();
  const double u = pa + (pb - pa) * rng.uniform();
  return normal_quantile(u);
}

double marsaglia_tsang(double shape, RandomStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double NormalParams::sd() const { return std::sqrt(variance); }

void NormalParams::validate() const {
  if (!std::isfinite(mean) || !(variance > 0.0) || !std::isfinite(variance)) {
    throw DomainError("normal: need finite mean and 0 < variance < inf (mean=" +
                      std::to_string(mean) + ", variance=" + std::to_string(variance) + ")");
  }
}

void GammaParams::validate() const {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("gamma: shape and rate must be positive and finite (shape=" +
                      std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
  }
}

void TruncatedNormalParams::validate() const {
  base.validate();
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    throw DomainError("truncated normal: need lower < upper (lower=" + std::to_string(lower) +
                      ", upper=" + std::to_string(upper) + ")");
  }
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_pdf(double x, const NormalParams& p) {
  const double sd = p.sd();
  return normal_pdf((x - p.mean) / sd) / sd;
}

double normal_log_pdf(double x, const NormalParams& p) {
  const double d = x - p.mean;
  return -kLogSqrt2Pi - 0.5 * std::log(p.variance) - 0.5 * d * d / p.variance;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_ccdf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("normal_quantile: u must lie in (0,1), got " + std::to_string(u));
  }
  double x = ppnd16(u);
  // One Halley polish against the erfc-based CDF.
  const double e = x > 0.0 ? -(normal_ccdf(x) - (1.0 - u)) : normal_cdf(x) - u;
  const double t = e / normal_pdf(x);
  if (std::isfinite(t)) x -= t / (1.0 + 0.5 * x * t);
  return x;
}

double sample_normal(RandomStream& rng) { return normal_quantile(rng.uniform()); }

double sample_normal(const NormalParams& p, RandomStream& rng) {
  return p.mean + p.sd() * sample_normal(rng);
}

double sample_truncated_normal(const TruncatedNormalParams& p, RandomStream& rng) {
  p.validate();
  const double sd = p.base.sd();
  const double a = (p.lower - p.base.mean) / sd;
  const double b = (p.upper - p.base.mean) / sd;
  if (!(a < b)) {
    throw NumericalError("truncated normal: interval collapsed after standardization (lower=" +
                         std::to_string(p.lower) + ", upper=" + std::to_string(p.upper) + ")");
  }
  double x = p.base.mean + sd * standard_truncated(a, b, rng);
  // Rounding can land on the closed-open boundary; support is (lower, upper].
  if (x <= p.lower) x = std::nextafter(p.lower, p.upper);
  if (x > p.upper) x = p.upper;
  return x;
}

double truncated_normal_cdf(double x, const TruncatedNormalParams& p) {
  if (x <= p.lower) return 0.0;
  if (x >= p.upper) return 1.0;
  const double sd = p.base.sd();
  const double a = (p.lower - p.base.mean) / sd;
  const double b = (p.upper - p.base.mean) / sd;
  const double z = (x - p.base.mean) / sd;
  if (a >= 0.0) {
    return (normal_ccdf(a) - normal_ccdf(z)) / (normal_ccdf(a) - normal_ccdf(b));
  }
  return (normal_cdf(z) - normal_cdf(a)) / (normal_cdf(b) - normal_cdf(a));
}

double gamma_log_pdf(double x, const GammaParams& p) {
  p.validate();
  if (x < 0.0) return -std::numeric_limits<double>::infinity();
  if (x == 0.0) {
    if (p.shape > 1.0) return -std::numeric_limits<double>::infinity();
    if (p.shape == 1.0) return std::log(p.rate);
    return std::numeric_limits<double>::infinity();
  }
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) + (p.shape - 1.0) * std::log(x) - p.rate * x;
}

double gamma_pdf(double x, const GammaParams& p) { return std::exp(gamma_log_pdf(x, p)); }

double inverse_gamma_log_pdf(double x, const GammaParams& p) {
  p.validate();
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) - (p.shape + 1.0) * std::log(x) - p.rate / x;
}

double inverse_gamma_pdf(double x, const GammaParams& p) {
  return std::exp(inverse_gamma_log_pdf(x, p));
}

double gamma_mean(const GammaParams& p) {
  p.validate();
  return p.shape / p.rate;
}

double inverse_gamma_mean(const GammaParams& p) {
  p.validate();
  if (p.shape <= 1.0) return std::numeric_limits<double>::infinity();
  return p.rate / (p.shape - 1.0);
}

double sample_gamma(const GammaParams& p, RandomStream& rng) {
  p.validate();
  if (p.shape >= 1.0) return marsaglia_tsang(p.shape, rng) / p.rate;
  const double g = marsaglia_tsang(p.shape + 1.0, rng);
  return g * std::pow(rng.uniform(), 1.0 / p.shape) / p.rate;
}

double sample_inverse_gamma(const GammaParams& p, RandomStream& rng) {
  // IG(a, b) is 1/Ga(a, b); draw Ga(a, 1) and scale so the rate enters once.
  p.validate();
  const GammaParams unit{p.shape, 1.0};
  return p.rate / sample_gamma(unit, rng);
}

double sample_uniform(double lower, double upper, RandomStream& rng) {
  if (!(lower < upper)) throw DomainError("uniform: need lower < upper");
  return lower + (upper - lower) * rng.uniform();
}

}  // namespace bnprdd
