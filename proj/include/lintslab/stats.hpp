#pragma once

namespace lintslab {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF, implemented with erfc for accuracy in both tails.
double norm_cdf(double x);

// Inverse of norm_cdf on (0, 1). AS241 (Wichura 1988), double precision.
// Throws InvalidParamError outside (0, 1).
double norm_quantile(double p);

}  // namespace lintslab
