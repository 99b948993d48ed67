#pragma once

#include <functional>
#include <stdexcept>

namespace uwb {

// Raised when adaptive refinement or a series truncation fails to meet tolerance.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive composite Simpson integration of f over [a, b] to the given relative
// tolerance. Throws QuadratureError if the subdivision budget is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol);

} // namespace uwb
