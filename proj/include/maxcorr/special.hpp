#pragma once

namespace maxcorr {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
/// (modified Lentz), relative accuracy ~1e-14 for moderate a, b.
double incomplete_beta(double a, double b, double x);

/// Student t CDF with nu > 0 degrees of freedom.
double student_t_cdf(double t, double nu);

/// P(|T| >= |t|) for T ~ t_nu.
double student_t_two_sided_p(double t, double nu);

}  // namespace maxcorr
