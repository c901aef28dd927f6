#pragma once

namespace ddqncd {

double normal_cdf(double x);

// Standard normal quantile. Acklam's rational approximation followed by one
// Halley step against erfc; absolute error is below 1e-13 on (1e-300, 1 - 1e-16).
// Throws std::domain_error outside (0, 1).
double normal_quantile(double prob);

}  // namespace ddqncd
