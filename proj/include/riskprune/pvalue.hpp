#pragma once

#include <string>

namespace riskprune {

enum class PValueKind { Binomial, Prw, Hb };
enum class PValueNMode { Kept, PaperLiteral };

std::string pvalue_name(PValueKind k);
PValueKind pvalue_from_name(const std::string& name);
std::string pvalue_n_mode_name(PValueNMode m);

// binary losses pair with any p-value; bounded losses only with prw and hb
bool pvalue_accepts_bounded(PValueKind k);

// P(Bin(n, p) <= k).  Exact lower-tail summation; k < 0 gives 0, k >= n
// gives 1.  Relative accuracy comfortably below 1e-12 for n up to 1e4.
double binom_cdf(long long k, long long n, double p);

// n samples with empirical risk rhat, tested against level alpha
struct RiskEvidence {
  long long n = 0;
  double rhat = 0.0;
  double alpha = 0.0;
};

// exact binomial tail, binary losses only
double p_binomial(const RiskEvidence& ev);

// pruned relative Markov + binomial factor, any loss bounded in [0, 1]
double p_prw(const RiskEvidence& ev);

// Hoeffding-Bentkus combination, any loss bounded in [0, 1]
double p_hb(const RiskEvidence& ev);

double p_value(PValueKind kind, const RiskEvidence& ev);

// Bernoulli KL divergence h1(a, b) with the conventions 0*log 0 = 0 and
// h1(a, 0) = +inf for a > 0
double bernoulli_kl(double a, double b);

}  // namespace riskprune
