#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace elliptau {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const cplx kI{0.0, 1.0};

// Thrown when a series hits max_terms before the tail bound is met.
struct NonConvergent : std::runtime_error {
    explicit NonConvergent(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

struct PoleAtLatticePoint : std::domain_error {
    explicit PoleAtLatticePoint(const std::string& what) : std::domain_error(what) {}
};

// Modular parameter of the torus; valid only in the upper half-plane.
struct ModularParameter {
    cplx tau;

    explicit ModularParameter(cplx t) : tau(t) {
        if (!(tau.imag() > 0.0))
            throw DomainError("ModularParameter: Im(tau) must be positive");
    }
    cplx nome() const { return std::exp(2.0 * kPi * kI * tau); }
};

// Truncation policy for all q-series in this module.  Summation stops when
// the last added term is below tail_tolerance and terms are decreasing.
struct SeriesControl {
    int max_terms = 200;
    double tail_tolerance = 1e-14;

    SeriesControl() = default;
    SeriesControl(int mt, double tol) : max_terms(mt), tail_tolerance(tol) {
        if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
        if (!(tail_tolerance > 0.0)) throw DomainError("SeriesControl: tail_tolerance must be > 0");
    }
};

// Jacobi theta_1(z|tau) and its first three z-derivatives (order 0..3),
// from the defining sum over half-integer characteristics.
cplx theta1(cplx z, const ModularParameter& tau, int order = 0,
            const SeriesControl& ctl = SeriesControl{});

// Dedekind eta(tau) = q^{1/24} prod_{n>=1} (1 - q^n).
cplx dedekind_eta(const ModularParameter& tau, const SeriesControl& ctl = SeriesControl{});

// d/dtau log eta(tau) = i pi/12 - 2 pi i sum_{n>=1} n q^n/(1-q^n), term-by-term.
cplx dlog_eta_dtau(const ModularParameter& tau, const SeriesControl& ctl = SeriesControl{});

// Weierstrass P and P' built on the theta_1 backbone:
//   P(z|tau) = -d^2/dz^2 log theta1(z) - (1/3) theta1'''(0)/theta1'(0).
struct WeierstrassValue {
    cplx p;
    cplx p_prime;
};
WeierstrassValue weierstrass_p(cplx z, const ModularParameter& tau,
                               const SeriesControl& ctl = SeriesControl{});

// -d^2/dz^2 log theta1(z|tau): the theta-regularized P, differing from
// weierstrass_p by the additive constant 4 pi i dlog_eta_dtau.
cplx wp_theta(cplx z, const ModularParameter& tau, const SeriesControl& ctl = SeriesControl{});

// Lame functions x(xi,z) = theta1(z-xi) theta1'(0) / (theta1(z) theta1(xi)),
// y(xi,z) = d/dxi x(xi,z), both by analytic theta derivatives.
struct LameValue {
    cplx x;
    cplx y;
};
LameValue lame(cplx xi, cplx z, const ModularParameter& tau,
               const SeriesControl& ctl = SeriesControl{});

// Distance from z to the lattice Z + tau Z.
double lattice_distance(cplx z, cplx tau);

} // namespace elliptau
