#ifndef INRLAB_BESSEL_HPP
#define INRLAB_BESSEL_HPP

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "inrlab/errors.hpp"

namespace inrlab {

namespace detail {

// Ascending power series; accurate for small |x| (used up to |x| <= 12).
inline double bessel_j_series(int n, double x) {
    const double h = 0.5 * x;
    // leading term (x/2)^n / n!
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= h / static_cast<double>(k);
    double sum = term;
    const double h2 = h * h;
    for (int m = 0; m < 400; ++m) {
        term *= -h2 / (static_cast<double>(m + 1) * static_cast<double>(n + m + 1));
        sum += term;
        if (std::fabs(term) < 1e-18 * (std::fabs(sum) + 1e-300)) break;
    }
    return sum;
}

// Miller backward recurrence, normalized via J_0 + 2*sum_{k>=1} J_{2k} = 1.
inline double bessel_j_miller(int n, double x) {
    int top = std::max(n, static_cast<int>(std::ceil(x)));
    int start = top + 1 + static_cast<int>(std::sqrt(40.0 * top));
    if (start % 2) ++start;

    double jp = 0.0;      // J~_{k+1}
    double jc = 1e-30;    // J~_k
    double norm = 0.0;
    double result = 0.0;
    for (int k = start; k >= 1; --k) {
        double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (k % 2 == 1) norm += 2.0 * jc;  // accumulates J~_{k-1}, k-1 even
        if (k - 1 == n) result = jc;
        if (std::fabs(jc) > 1e250) {       // rescale to dodge overflow
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    norm -= jc;  // the k=0 term was added twice by the even branch
    return result / norm;
}

} // namespace detail

// First-kind Bessel function J_order(x) for |order| <= 64, |x| <= 50.
inline double bessel_j(int order, double x) {
    if (std::abs(order) > 64) throw DomainError("bessel_j: |order| must be <= 64");
    if (!(std::fabs(x) <= 50.0)) throw DomainError("bessel_j: |x| must be <= 50");

    double sign = 1.0;
    int n = order;
    if (n < 0) {               // J_{-n}(x) = (-1)^n J_n(x)
        n = -n;
        if (n % 2) sign = -sign;
    }
    if (x < 0.0) {             // J_n(-x) = (-1)^n J_n(x)
        x = -x;
        if (n % 2) sign = -sign;
    }
    if (x == 0.0) return n == 0 ? sign : 0.0;

    double v = (x <= 12.0) ? detail::bessel_j_series(n, x)
                           : detail::bessel_j_miller(n, x);
    return sign * v;
}

} // namespace inrlab

#endif
