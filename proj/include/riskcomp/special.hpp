#ifndef RISKCOMP_SPECIAL_HPP
#define RISKCOMP_SPECIAL_HPP

namespace riskcomp {

/// psi(x) = d/dx log Gamma(x), x > 0. Recurrence below 6, asymptotic series above.
double digamma(double x);

/// psi'(x), x > 0.
double trigamma(double x);

}  // namespace riskcomp

#endif  // RISKCOMP_SPECIAL_HPP
