#include "riskprune/pvalue.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskprune {

namespace {

// integer exponent by squaring, exact whenever every intermediate is
long double ipow(long double base, long long e) {
  long double r = 1.0L;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// conversions from n * rhat to integer counts carry a 1e-9 slack so values
// that are integral up to rounding land on the intended integer
long long floor_count(double x) { return static_cast<long long>(std::floor(x + 1e-9)); }
long long ceil_count(double x) { return static_cast<long long>(std::ceil(x - 1e-9)); }

double clamp_unit(double p) {
  if (!(p > std::numeric_limits<double>::min())) return std::numeric_limits<double>::min();
  return p < 1.0 ? p : 1.0;
}

void check_evidence(const RiskEvidence& ev) {
  if (ev.n < 1) throw std::invalid_argument("risk evidence needs at least one sample");
  if (!(ev.rhat >= 0.0 && ev.rhat <= 1.0))
    throw std::invalid_argument("empirical risk must lie in [0, 1]");
  if (!(ev.alpha > 0.0 && ev.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

double binom_cdf(long long k, long long n, double p) {
  if (n < 1) throw std::invalid_argument("binom_cdf needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binom_cdf needs p in [0, 1]");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;

  const long double lp = static_cast<long double>(p);
  const long double lq = 1.0L - lp;
  const long double log_pmf0 = static_cast<long double>(n) * logl(lq);

  long double sum;
  if (log_pmf0 > -11000.0L) {
    // term recurrence from pmf(0) = q^n; later terms only shrink once past
    // the mode, where the sum already dominates them
    long double pmf = ipow(lq, n);
    sum = pmf;
    for (long long i = 0; i < k; ++i) {
      pmf = pmf * static_cast<long double>(n - i) * lp /
            (static_cast<long double>(i + 1) * lq);
      sum += pmf;
    }
  } else {
    // q^n underflows even extended precision: evaluate each term in
    // log space instead
    const long double lgn = lgammal(static_cast<long double>(n) + 1.0L);
    const long double llp = logl(lp);
    const long double llq = logl(lq);
    sum = 0.0L;
    for (long long i = 0; i <= k; ++i) {
      long double lt = lgn - lgammal(static_cast<long double>(i) + 1.0L) -
                       lgammal(static_cast<long double>(n - i) + 1.0L) +
                       static_cast<long double>(i) * llp +
                       static_cast<long double>(n - i) * llq;
      sum += expl(lt);
    }
  }
  if (sum > 1.0L) sum = 1.0L;
  if (sum < 0.0L) sum = 0.0L;
  return static_cast<double>(sum);
}

double bernoulli_kl(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0))
    throw std::invalid_argument("bernoulli_kl needs arguments in [0, 1]");
  double t = 0.0;
  if (a > 0.0) {
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    t += a * std::log(a / b);
  }
  if (a < 1.0) {
    if (b == 1.0) return std::numeric_limits<double>::infinity();
    t += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
  }
  return t;
}

double p_binomial(const RiskEvidence& ev) {
  check_evidence(ev);
  long long k = floor_count(static_cast<double>(ev.n) * ev.rhat);
  return clamp_unit(binom_cdf(k, ev.n, ev.alpha));
}

double p_prw(const RiskEvidence& ev) {
  check_evidence(ev);
  const double n = static_cast<double>(ev.n);
  long long gamma = ceil_count(n * ev.alpha);  // smallest count at or above n * alpha
  if (gamma < 1) gamma = 1;
  if (ev.rhat < static_cast<double>(gamma - 1) / n) {
    long long m = ceil_count(n * ev.rhat);
    double factor =
        ev.alpha * (n - static_cast<double>(m)) / (n * ev.alpha - static_cast<double>(m));
    return clamp_unit(factor * binom_cdf(m, ev.n, ev.alpha));
  }
  // past the branch point the bound is at least one
  return 1.0;
}

double p_hb(const RiskEvidence& ev) {
  check_evidence(ev);
  long long m = ceil_count(static_cast<double>(ev.n) * ev.rhat);
  double bentkus = std::exp(1.0) * binom_cdf(m, ev.n, ev.alpha);
  double kl = bernoulli_kl(std::min(ev.rhat, ev.alpha), ev.alpha);
  double hoeffding =
      std::isinf(kl) ? 0.0 : std::exp(-static_cast<double>(ev.n) * kl);
  return clamp_unit(std::min(bentkus, hoeffding));
}

double p_value(PValueKind kind, const RiskEvidence& ev) {
  switch (kind) {
    case PValueKind::Binomial: return p_binomial(ev);
    case PValueKind::Prw: return p_prw(ev);
    case PValueKind::Hb: return p_hb(ev);
  }
  throw std::invalid_argument("unknown p-value kind");
}

std::string pvalue_name(PValueKind k) {
  switch (k) {
    case PValueKind::Binomial: return "binomial";
    case PValueKind::Prw: return "prw";
    case PValueKind::Hb: return "hb";
  }
  return "?";
}

PValueKind pvalue_from_name(const std::string& name) {
  if (name == "binomial") return PValueKind::Binomial;
  if (name == "prw") return PValueKind::Prw;
  if (name == "hb") return PValueKind::Hb;
  throw std::invalid_argument("unknown p-value kind: " + name);
}

std::string pvalue_n_mode_name(PValueNMode m) {
  return m == PValueNMode::Kept ? "kept" : "paper-literal";
}

bool pvalue_accepts_bounded(PValueKind k) { return k != PValueKind::Binomial; }

}  // namespace riskprune
