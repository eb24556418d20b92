#ifndef INRLAB_DUAL_HPP
#define INRLAB_DUAL_HPP

#include <cmath>

namespace inrlab {

// Forward-mode scalar carrying a value and one directional derivative.
// Running the reverse-mode pass with Dual parameters yields exact
// Hessian-vector products (forward-over-reverse).
struct Dual {
    double v = 0.0;
    double d = 0.0;

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
inline Dual operator/(Dual a, Dual b) {
    double inv = 1.0 / b.v;
    double q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
}

inline Dual& operator+=(Dual& a, Dual b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, Dual b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, Dual b) { a = a * b; return a; }

inline bool operator<(Dual a, Dual b) { return a.v < b.v; }
inline bool operator>(Dual a, Dual b) { return a.v > b.v; }

inline Dual sin(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual cos(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Dual sqrt(Dual a) {
    double r = std::sqrt(a.v);
    return {r, 0.5 * a.d / r};
}

// Uniform accessors so numeric code can template over double and Dual.
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

// Plain-double passthroughs so unqualified calls in inrlab:: pick the right
// overload for both scalar types.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double sqrt(double x) { return std::sqrt(x); }

} // namespace inrlab

#endif
