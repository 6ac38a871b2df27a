#include "parapack/stats/distributions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "parapack/error.hpp"

namespace parapack::stats {

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("student_t_two_sided_p: dof must be positive");
    if (std::isnan(t)) throw DomainError("student_t_two_sided_p: t is NaN");
    if (std::isinf(t)) return 0.0;
    const double x = dof / (dof + t * t);
    return boost::math::ibeta(0.5 * dof, 0.5, x);
}

}  // namespace parapack::stats
