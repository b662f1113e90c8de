#pragma once

#include <vector>

namespace glmens {

// p-values are floored so -log10(p) stays finite (<= 300)
inline constexpr double kPValueFloor = 1e-300;

double clamp_p(double p);

// two-sided tail of the standard normal at |z|
double normal_two_sided_p(double z);

// tails of Student's t with df degrees of freedom
double student_t_two_sided_p(double t, double df);
double student_t_upper_p(double t, double df);

double mean(const std::vector<double>& x);
double sample_sd(const std::vector<double>& x);  // n-1 denominator

}  // namespace glmens
