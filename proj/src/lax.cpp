#include "elliptau/lax.hpp"

#include <cmath>
#include <functional>

namespace elliptau {

Matrix CoefficientPoint::residue(int k) const {
    const Matrix& Gk = G[static_cast<size_t>(k)];
    return Gk.inverse() * m[static_cast<size_t>(k)].asDiagonal() * Gk;
}

void CoefficientPoint::validate(double tol) const {
    const int N = config.rank;
    const int n = config.n();
    if (P.size() != N || Q.size() != N)
        throw InvariantViolation("CoefficientPoint: P,Q must have N entries");
    if (static_cast<int>(m.size()) != n || static_cast<int>(G.size()) != n)
        throw InvariantViolation("CoefficientPoint: need one (m_k, G_k) per puncture");
    if (std::abs(P.sum()) > tol || std::abs(Q.sum()) > tol)
        throw InvariantViolation("CoefficientPoint: sum P_j and sum Q_j must vanish");
    Vector diag_sum = Vector::Zero(N);
    for (int k = 0; k < n; ++k) {
        if (std::abs(m[k].sum()) > tol)
            throw InvariantViolation("CoefficientPoint: tr m_k must vanish");
        if (std::abs(G[k].determinant() - 1.0) > tol)
            throw InvariantViolation("CoefficientPoint: G_k must be unimodular");
        // m_k = 0 means a vanishing residue: no Frobenius ambiguity, so the
        // non-resonance requirement is vacuous there.
        if (m[k].cwiseAbs().maxCoeff() > tol)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    if (i != j) {
                        const cplx d = m[k](i) - m[k](j);
                        if (std::abs(d - std::round(d.real())) < 1e-8 && std::abs(d.imag()) < 1e-8)
                            throw InvariantViolation(
                                "CoefficientPoint: resonant exponents m_i - m_j in Z");
                    }
        diag_sum += residue(k).diagonal();
    }
    if (diag_sum.cwiseAbs().maxCoeff() > tol)
        throw InvariantViolation("CoefficientPoint: sum_k (A_k)_ii must vanish");
}

CoefficientPoint cm_coefficient_point(const CMPoint& p) {
    CoefficientPoint c{TorusConfig{p.tau, {cplx(0.0)}, 2}, Vector(2), Vector(2), {}, {}};
    c.P << p.P, -p.P;
    c.Q << p.Q, -p.Q;
    Vector mk(2);
    mk << p.m, -p.m;
    c.m.push_back(mk);
    // A_1 = -m sigma_1 = G^{-1} diag(m,-m) G with G = [[1,-1],[1,1]]/sqrt(2).
    Matrix G(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    G << s, -s, s, s;
    c.G.push_back(G);
    return c;
}

LaxMatrices build_lax(const CoefficientPoint& c, cplx z, const SeriesControl& ctl) {
    c.validate();
    const int N = c.config.rank;
    const int n = c.config.n();
    const ModularParameter& tau = c.config.tau;

    for (int k = 0; k < n; ++k)
        if (lattice_distance(z - c.config.punctures[k], tau.tau) < 1e-8)
            throw PoleAtPuncture("build_lax: z at a puncture");

    std::vector<Matrix> A(n);
    for (int k = 0; k < n; ++k) A[k] = c.residue(k);

    LaxMatrices out;
    out.L_z = Matrix::Zero(N, N);
    out.L_tau = Matrix::Zero(N, N);
    out.L_k.assign(n, Matrix::Zero(N, N));

    for (int k = 0; k < n; ++k) {
        const cplx u = z - c.config.punctures[k];
        const cplx t0 = theta1(u, tau, 0, ctl);
        const cplx t1 = theta1(u, tau, 1, ctl);
        const cplx t2 = theta1(u, tau, 2, ctl);
        const cplx logd = t1 / t0;
        const cplx logd2 = t2 / t0;
        for (int i = 0; i < N; ++i) {
            out.L_z(i, i) += logd * A[k](i, i);
            out.L_k[k](i, i) = -logd * A[k](i, i);
            out.L_tau(i, i) += -0.5 * logd2 * A[k](i, i);
            for (int j = 0; j < N; ++j) {
                if (i == j) continue;
                const LameValue xy = lame(c.Q(j) - c.Q(i), u, tau, ctl);
                out.L_z(i, j) += -xy.x * A[k](i, j);
                out.L_k[k](i, j) = xy.x * A[k](i, j);
                out.L_tau(i, j) += -xy.y * A[k](i, j);
            }
        }
    }
    for (int i = 0; i < N; ++i) out.L_z(i, i) += c.P(i);
    return out;
}

namespace {

// Trapezoid of f over a closed circle of given radius around center.
cplx circle_integral(const std::function<cplx(cplx)>& f, cplx center, double radius, int M) {
    cplx sum = 0.0;
    for (int j = 0; j < M; ++j) {
        const double t = 2.0 * kPi * j / M;
        const cplx pos = center + radius * std::exp(kI * t);
        const cplx dz = radius * kI * std::exp(kI * t) * (2.0 * kPi / M);
        sum += f(pos) * dz;
    }
    return sum;
}

// Trapezoid over the horizontal A-cycle segment of unit Re-length.
cplx acycle_integral(const std::function<cplx(cplx)>& f, cplx start, int M) {
    cplx sum = 0.0;
    for (int j = 0; j < M; ++j) sum += f(start + cplx(double(j) / M, 0.0)) / double(M);
    return sum;
}

} // namespace

Hamiltonians hamiltonians(const CoefficientPoint& c, const QuadratureOptions& opt) {
    c.validate();
    const int n = c.config.n();
    auto half_tr_L2 = [&](cplx z) {
        const Matrix L = build_lax(c, z, SeriesControl{}).L_z;
        return 0.5 * (L * L).trace();
    };

    Hamiltonians out;
    out.quadrature_error = 0.0;
    for (int k = 0; k < n; ++k) {
        const cplx zk = c.config.punctures[k];
        const cplx coarse =
            circle_integral(half_tr_L2, zk, opt.residue_radius, opt.points) / (2.0 * kPi * kI);
        const cplx fine =
            circle_integral(half_tr_L2, zk, opt.residue_radius, 2 * opt.points) / (2.0 * kPi * kI);
        out.quadrature_error = std::max(out.quadrature_error, std::abs(fine - coarse));
        out.H_z.push_back(fine);
    }
    const cplx start = cplx(-0.5, 0.0) + opt.acycle_height_fraction * c.config.tau.tau;
    const cplx coarse = acycle_integral(half_tr_L2, start, opt.points);
    const cplx fine = acycle_integral(half_tr_L2, start, 2 * opt.points);
    out.quadrature_error = std::max(out.quadrature_error, std::abs(fine - coarse));
    out.H_tau = fine;
    if (out.quadrature_error > 1e-9)
        throw QuadratureNotConverged("hamiltonians: doubling the sample count moved the result by " +
                                     std::to_string(out.quadrature_error));
    return out;
}

LocalExpansion local_expansion(const CoefficientPoint& c, int k, const SeriesControl& ctl) {
    c.validate();
    const int N = c.config.rank;
    const int n = c.config.n();
    const ModularParameter& tau = c.config.tau;
    const cplx zk = c.config.punctures[k];

    std::vector<Matrix> A(n);
    for (int kk = 0; kk < n; ++kk) A[kk] = c.residue(kk);

    Matrix rhs = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) rhs(i, i) = c.P(i);
    for (int kp = 0; kp < n; ++kp) {
        if (kp == k) continue;
        const cplx u = zk - c.config.punctures[kp];
        const cplx logd = theta1(u, tau, 1, ctl) / theta1(u, tau, 0, ctl);
        for (int i = 0; i < N; ++i) {
            rhs(i, i) += logd * A[kp](i, i);
            for (int j = 0; j < N; ++j) {
                if (i == j) continue;
                rhs(i, j) += -lame(c.Q(i) - c.Q(j), u, tau, ctl).x * A[kp](i, j);
            }
        }
    }

    const Matrix& Gk = c.G[static_cast<size_t>(k)];
    const Vector& mk = c.m[static_cast<size_t>(k)];
    const Matrix W = Gk * rhs * Gk.inverse();  // W = g1 + [m_k, g1]
    Matrix g1(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const cplx div = 1.0 + mk(i) - mk(j);
            if (std::abs(div) < 1e-12)
                throw ResonantExponents("local_expansion: vanishing divisor 1 + m_i - m_j");
            g1(i, j) = W(i, j) / div;
        }

    return LocalExpansion{k, mk, Gk, g1, rhs};
}

cplx cm_hamiltonian(const CMPoint& p, const SeriesControl& ctl) {
    if (lattice_distance(2.0 * p.Q, p.tau.tau) < 1e-8)
        throw PoleAtLatticePoint("cm_hamiltonian: 2Q on the lattice");
    const cplx wp = weierstrass_p(2.0 * p.Q, p.tau, ctl).p;
    return p.P * p.P - p.m * p.m * wp + 4.0 * kPi * kI * p.m * p.m * dlog_eta_dtau(p.tau, ctl);
}

} // namespace elliptau
