#pragma once

#include <functional>
#include <vector>

#include "elliptau/lax.hpp"

namespace elliptau {

struct StepUnderflow : std::runtime_error {
    explicit StepUnderflow(const std::string& what) : std::runtime_error(what) {}
};

struct ToleranceNotMet : std::runtime_error {
    explicit ToleranceNotMet(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateMA : std::runtime_error {
    explicit DegenerateMA(const std::string& what) : std::runtime_error(what) {}
};

struct CollisionWithPole : std::runtime_error {
    explicit CollisionWithPole(const std::string& what) : std::runtime_error(what) {}
};

// A path in the z-plane: either a chain of segments or a circle.
struct PathSpec {
    std::vector<cplx> waypoints;                // segment chain when size >= 2
    bool is_circle = false;
    cplx center;
    double radius = 0.0;
    int turns = 1;                              // positive = counterclockwise

    static PathSpec segments(std::vector<cplx> pts) {
        PathSpec p;
        p.waypoints = std::move(pts);
        return p;
    }
    static PathSpec circle(cplx center, double radius, int turns = 1) {
        PathSpec p;
        p.is_circle = true;
        p.center = center;
        p.radius = radius;
        p.turns = turns;
        return p;
    }
};

using MatrixField = std::function<Matrix(cplx)>;

// Transfer matrix of d/dz Phi = Phi L(z) along the path: the solution with
// Phi(start) = 1 satisfies Phi(end) = transfer.  Adaptive embedded
// Dormand-Prince 4(5) with absolute + relative error control.
Matrix integrate_linear(const MatrixField& field, const PathSpec& path, double tol);

// Transport that also reports the solution at user-chosen fractions of the
// (single-segment) path; used to sample fundamental solutions on circles.
std::vector<Matrix> integrate_linear_samples(const MatrixField& field, cplx z0, cplx z1,
                                             const std::vector<double>& fractions, double tol);

struct MonodromyData {
    Matrix M_A;             // diagonal after the gauge normalization
    Matrix M_B;
    std::vector<Matrix> M_k;
    Vector a1;              // exponents of M_A, Re in (-1/2, 1/2], sorted
    Matrix gauge;           // S with  M -> S M S^{-1} applied to every matrix
    cplx basepoint;
    double cyclic_residual;
};

struct MonodromyOptions {
    double tol = 1e-12;
    double loop_radius = 0.1;
    bool normalize = true;  // conjugate so M_A is diagonal
};

// Monodromy of the torus linear system of c, basepoint z0 = -(1+tau)/4,
// Phi(z0) = 1.  M_A from z0 -> z0+1, M_B = T_B e^{-2 pi i Q}, M_k from
// loops around the punctures.
MonodromyData monodromy(const CoefficientPoint& c,
                        const MonodromyOptions& opt = MonodromyOptions{});

// One integration state of the non-autonomous CM flow.
struct CMSample {
    cplx tau;
    cplx P;
    cplx Q;
    cplx g;
    cplx logtau_increment;  // int H_CM dtau / (2 pi i), accumulated from the start
};

struct CMTrajectory {
    std::vector<CMSample> samples;
    double ode_tolerance;
};

// Integrates 2pi i dQ/dtau = P, 2pi i dP/dtau = m^2 P'(2Q|tau) along the
// straight tau-segment, carrying g via 2pi i dg/dtau = -2 m P(2Q|tau) and
// the log-tau increment via H_CM.
CMTrajectory cm_flow(const CMPoint& start, cplx tau_end, double tol, int store_samples = 33);

// Splits a residue diagonalizer G = D G0, G0 = [[1,-1],[1,1]], D diagonal,
// and returns g = log(D11/D22) on the principal branch.
struct BranchJump : std::runtime_error {
    explicit BranchJump(const std::string& what) : std::runtime_error(what) {}
};
cplx extract_g(const Matrix& G);

// Unwraps g continuously: shifts g by multiples of 2 pi i to land nearest prev.
cplx unwrap_g(cplx g, cplx prev);

} // namespace elliptau
