#include "glmens/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glmens {

double clamp_p(double p) {
    if (std::isnan(p)) return 1.0;
    return std::clamp(p, kPValueFloor, 1.0);
}

double normal_two_sided_p(double z) {
    if (std::isnan(z)) return 1.0;
    // 2*Phi(-|z|) = erfc(|z|/sqrt(2))
    return std::erfc(std::abs(z) / 1.4142135623730950488016887242097);
}

double student_t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double student_t_upper_p(double t, double df) {
    if (std::isnan(t)) throw std::runtime_error("t statistic is NaN");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) throw std::runtime_error("sample_sd needs at least 2 values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace glmens
