#pragma once

namespace qhub::normal {

double pdf(double z);
double cdf(double z);
/// Upper tail 1 - cdf(z), accurate for large z.
double ccdf(double z);
/// log(cdf(z)), finite far into the lower tail.
double log_cdf(double z);
/// Inverse of cdf on (0, 1).
double quantile(double p);

} // namespace qhub::normal
