#pragma once

#include <vector>

#include <Eigen/Dense>

#include "elliptau/special.hpp"

namespace elliptau {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct PoleAtPuncture : std::domain_error {
    explicit PoleAtPuncture(const std::string& what) : std::domain_error(what) {}
};

struct InvariantViolation : std::invalid_argument {
    explicit InvariantViolation(const std::string& what) : std::invalid_argument(what) {}
};

struct QuadratureNotConverged : std::runtime_error {
    explicit QuadratureNotConverged(const std::string& what) : std::runtime_error(what) {}
};

struct ResonantExponents : std::domain_error {
    explicit ResonantExponents(const std::string& what) : std::domain_error(what) {}
};

// Geometric base of the linear system: tau, the punctures, and the rank.
struct TorusConfig {
    ModularParameter tau;
    std::vector<cplx> punctures;
    int rank = 2;

    int n() const { return static_cast<int>(punctures.size()); }
};

// A point of the extended coefficient space: diagonal P, Q, the eigenvalue
// vectors m_k and the diagonalizers G_k of the residues A_k = G_k^{-1} m_k G_k.
struct CoefficientPoint {
    TorusConfig config;
    Vector P;                     // N entries, sum zero
    Vector Q;                     // N entries, sum zero
    std::vector<Vector> m;        // n vectors of N eigenvalues, each traceless
    std::vector<Matrix> G;        // n unimodular N x N diagonalizers

    Matrix residue(int k) const;  // A_k = G_k^{-1} diag(m_k) G_k

    // Checks all constraints to tolerance; throws InvariantViolation.
    void validate(double tol = 1e-10) const;
};

// The one-punctured-torus Calogero-Moser specialization.
struct CMPoint {
    cplx P;
    cplx Q;
    cplx m;
    ModularParameter tau;
};

// CoefficientPoint for CM data: P = (P,-P), Q = (Q,-Q), A_1 = -m sigma_1.
CoefficientPoint cm_coefficient_point(const CMPoint& p);

struct LaxMatrices {
    Matrix L_z;
    std::vector<Matrix> L_k;
    Matrix L_tau;
};

// Entrywise assembly of the SL(N) n-point torus Lax matrices at z.
LaxMatrices build_lax(const CoefficientPoint& c, cplx z,
                      const SeriesControl& ctl = SeriesControl{});

struct Hamiltonians {
    std::vector<cplx> H_z;  // residues of (1/2) tr L^2 at the punctures
    cplx H_tau;             // A-cycle integral of (1/2) tr L^2
    double quadrature_error;
};

struct QuadratureOptions {
    int points = 256;            // samples per contour (doubled for the error check)
    double residue_radius = 0.05;
    double acycle_height_fraction = -0.25;  // A-cycle at Im z = fraction * Im tau
};

Hamiltonians hamiltonians(const CoefficientPoint& c,
                          const QuadratureOptions& opt = QuadratureOptions{});

// First Frobenius level at puncture k:  g_{k,1} with
// [G_k^{-1}(g_{k,1} + [m_k, g_{k,1}]) G_k]_{ij} equal to the local expansion
// of the Lax matrix, solved entrywise with divisors 1 + m_i - m_j.
struct LocalExpansion {
    int k;
    Vector m;
    Matrix G;
    Matrix g1;
    Matrix rhs;  // the matrix the relation reconstructs, kept for residual checks
};

LocalExpansion local_expansion(const CoefficientPoint& c, int k,
                               const SeriesControl& ctl = SeriesControl{});

// Closed form H_CM = P^2 - m^2 P(2Q|tau) + 4 pi i m^2 dlog eta/dtau.
cplx cm_hamiltonian(const CMPoint& p, const SeriesControl& ctl = SeriesControl{});

} // namespace elliptau
