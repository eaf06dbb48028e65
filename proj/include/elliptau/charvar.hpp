#pragma once

#include "elliptau/lax.hpp"

namespace elliptau {

struct DegenerateParametrization : std::domain_error {
    explicit DegenerateParametrization(const std::string& what) : std::domain_error(what) {}
};

// A point of the extended SL(2) one-punctured-torus character variety.
struct DarbouxPoint {
    cplx a;
    cplx nu;
    cplx m;
    cplx c = 0.0;

    void validate() const;
};

struct Rep {
    Matrix M_A;
    Matrix M_0;
    Matrix M_B;
    Matrix C_0;  // eigenvector matrix of M_0, already multiplied by e^{c sigma3}
};

// Explicit monodromy matrices: M_A = e^{2 pi i a sigma3}, M_B trigonometric,
// M_0 solved from the cyclic constraint M_B^-1 M_A^-1 M_B M_A M_0 = 1.
Rep rep_from_darboux(const DarbouxPoint& d);

struct TraceCoordinates {
    cplx p_A;
    cplx p_B;
    cplx p_AB;
    cplx p_0;
    double fricke_residual;  // |p_A^2+p_B^2+p_AB^2 - p_A p_B p_AB - p_0 - 2|
};

TraceCoordinates trace_coordinates(const Matrix& M_A, const Matrix& M_B);

enum class TraceCoord { p_A, p_B, p_AB };

// Goldman bracket {f,g} = (1/2pi)(df/da dg/dnu - df/dnu dg/da) by central
// differences of step h; the normalization matches Omega_G = 2 pi da ^ dnu.
cplx goldman_bracket(const DarbouxPoint& d, TraceCoord f, TraceCoord g, double h);

// Inverts the parametrization on the B-matrix entries:
//   nu = 2i Log[(M_B)_11 sin(2 pi a)/sin(pi(2a - m))], principal Log.
cplx nu_from_MB(const Matrix& M_B, cplx a, cplx m);

} // namespace elliptau
