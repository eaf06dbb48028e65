#include "elliptau/transport.hpp"

#include <algorithm>
#include <cmath>

namespace elliptau {

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

constexpr long kMaxSteps = 2000000;

using Rhs = std::function<Matrix(double, const Matrix&)>;

// One adaptive sweep of t from 0 to 1.  Y is overwritten with the solution.
void dopri5(const Rhs& f, Matrix& Y, double tol) {
    const double atol = tol, rtol = tol;
    double t = 0.0;
    double h = 0.05;
    Matrix k1 = f(t, Y);
    for (long step = 0; step < kMaxSteps; ++step) {
        if (t >= 1.0) return;
        h = std::min(h, 1.0 - t);
        if (h < 1e-14) throw StepUnderflow("dopri5: step size underflow");

        const Matrix k2 = f(t + c2 * h, Y + h * (a21 * k1));
        const Matrix k3 = f(t + c3 * h, Y + h * (a31 * k1 + a32 * k2));
        const Matrix k4 = f(t + c4 * h, Y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Matrix k5 = f(t + c5 * h, Y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Matrix k6 =
            f(t + h, Y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Matrix Ynew = Y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Matrix k7 = f(t + h, Ynew);
        const Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0.0;
        for (Eigen::Index i = 0; i < Y.rows(); ++i)
            for (Eigen::Index j = 0; j < Y.cols(); ++j) {
                const double scale =
                    atol + rtol * std::max(std::abs(Y(i, j)), std::abs(Ynew(i, j)));
                norm = std::max(norm, std::abs(err(i, j)) / scale);
            }

        if (norm <= 1.0) {
            t += h;
            Y = Ynew;
            k1 = k7;  // first-same-as-last
        }
        const double factor =
            (norm > 0.0) ? std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0) : 5.0;
        h *= factor;
    }
    throw ToleranceNotMet("dopri5: exceeded the step budget");
}

Matrix transfer_segment(const MatrixField& field, cplx z0, cplx z1, double tol, Matrix Y) {
    const cplx dz = z1 - z0;
    auto rhs = [&](double t, const Matrix& y) -> Matrix { return dz * (y * field(z0 + t * dz)); };
    dopri5(rhs, Y, tol);
    return Y;
}

Matrix transfer_circle(const MatrixField& field, cplx center, double radius, int turns, double tol,
                       Matrix Y) {
    const double total = 2.0 * kPi * turns;
    auto rhs = [&](double t, const Matrix& y) -> Matrix {
        const cplx pos = center + radius * std::exp(kI * (total * t));
        const cplx dz = radius * kI * total * std::exp(kI * (total * t));
        return dz * (y * field(pos));
    };
    dopri5(rhs, Y, tol);
    return Y;
}

} // namespace

Matrix integrate_linear(const MatrixField& field, const PathSpec& path, double tol) {
    if (tol < 1e-13 || tol > 1e-6)
        throw DomainError("integrate_linear: tol must lie in [1e-13, 1e-6]");
    Matrix Y;
    if (path.is_circle) {
        const Matrix probe = field(path.center + path.radius);
        Y = Matrix::Identity(probe.rows(), probe.cols());
        return transfer_circle(field, path.center, path.radius, path.turns, tol, Y);
    }
    if (path.waypoints.size() < 2)
        throw DomainError("integrate_linear: need at least two waypoints");
    const Matrix probe = field(path.waypoints.front());
    Y = Matrix::Identity(probe.rows(), probe.cols());
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i)
        Y = transfer_segment(field, path.waypoints[i], path.waypoints[i + 1], tol, Y);
    return Y;
}

std::vector<Matrix> integrate_linear_samples(const MatrixField& field, cplx z0, cplx z1,
                                             const std::vector<double>& fractions, double tol) {
    const Matrix probe = field(z0);
    Matrix Y = Matrix::Identity(probe.rows(), probe.cols());
    std::vector<Matrix> out;
    out.reserve(fractions.size());
    double prev = 0.0;
    for (double fr : fractions) {
        if (fr < prev) throw DomainError("integrate_linear_samples: fractions must be sorted");
        if (fr > prev)
            Y = transfer_segment(field, z0 + prev * (z1 - z0), z0 + fr * (z1 - z0), tol, Y);
        prev = fr;
        out.push_back(Y);
    }
    return out;
}

namespace {

// L_z evaluator with the residues cached; skips per-call invariant checks.
struct LaxField {
    CoefficientPoint c;
    std::vector<Matrix> A;
    SeriesControl ctl;

    explicit LaxField(const CoefficientPoint& point) : c(point) {
        c.validate();
        for (int k = 0; k < c.config.n(); ++k) A.push_back(c.residue(k));
    }

    Matrix operator()(cplx z) const {
        const int N = c.config.rank;
        const ModularParameter& tau = c.config.tau;
        Matrix L = Matrix::Zero(N, N);
        for (int k = 0; k < c.config.n(); ++k) {
            const cplx u = z - c.config.punctures[k];
            const cplx logd = theta1(u, tau, 1, ctl) / theta1(u, tau, 0, ctl);
            for (int i = 0; i < N; ++i) {
                L(i, i) += logd * A[k](i, i);
                for (int j = 0; j < N; ++j) {
                    if (i == j) continue;
                    L(i, j) += -lame(c.Q(j) - c.Q(i), u, tau, ctl).x * A[k](i, j);
                }
            }
        }
        for (int i = 0; i < N; ++i) L(i, i) += c.P(i);
        return L;
    }
};

} // namespace

MonodromyData monodromy(const CoefficientPoint& c, const MonodromyOptions& opt) {
    const LaxField field(c);
    MatrixField f = [&](cplx z) { return field(z); };
    const cplx tau = c.config.tau.tau;
    const cplx z0 = -(1.0 + tau) / 4.0;
    const int N = c.config.rank;

    MonodromyData out;
    out.basepoint = z0;
    out.M_A = integrate_linear(f, PathSpec::segments({z0, z0 + 1.0}), opt.tol);
    const Matrix T_B = integrate_linear(f, PathSpec::segments({z0, z0 + tau}), opt.tol);
    Matrix expQ = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) expQ(i, i) = std::exp(-2.0 * kPi * kI * c.Q(i));
    out.M_B = T_B * expQ;

    for (int k = 0; k < c.config.n(); ++k) {
        const cplx zk = c.config.punctures[k];
        // Connector to a point below the puncture, then a positive loop.
        const cplx anchor = zk - kI * opt.loop_radius;
        const Matrix U1 = integrate_linear(f, PathSpec::segments({z0, anchor}), opt.tol);
        const Matrix Uc =
            integrate_linear(f, PathSpec::circle(zk, opt.loop_radius, 1), opt.tol);
        out.M_k.push_back(U1 * Uc * U1.inverse());
    }

    if (opt.normalize) {
        Eigen::ComplexEigenSolver<Matrix> es(out.M_A);
        Vector lam = es.eigenvalues();
        Matrix V = es.eigenvectors();
        // Exponents on the principal branch, Re in (-1/2, 1/2].
        std::vector<int> order(static_cast<size_t>(N));
        Vector a(N);
        for (int i = 0; i < N; ++i) {
            const cplx l = std::log(lam(i));
            a(i) = l / (2.0 * kPi * kI);
            order[static_cast<size_t>(i)] = i;
        }
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            if (std::abs(a(i).real() - a(j).real()) > 1e-14) return a(i).real() > a(j).real();
            return a(i).imag() > a(j).imag();
        });
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                if (std::abs(lam(order[i]) - lam(order[j])) < 1e-8)
                    throw DegenerateMA("monodromy: M_A eigenvalues coincide");
        Matrix Vs(N, N);
        Vector as(N);
        for (int i = 0; i < N; ++i) {
            Vector col = V.col(order[static_cast<size_t>(i)]);
            int imax = 0;
            for (int r = 1; r < N; ++r)
                if (std::abs(col(r)) > std::abs(col(imax))) imax = r;
            Vs.col(i) = col / col(imax);
            as(i) = a(order[static_cast<size_t>(i)]);
        }
        out.gauge = Vs.inverse();
        out.a1 = as;
        out.M_A = out.gauge * out.M_A * Vs;
        out.M_B = out.gauge * out.M_B * Vs;
        for (auto& M : out.M_k) M = out.gauge * M * Vs;
    } else {
        out.gauge = Matrix::Identity(N, N);
        out.a1 = Vector::Zero(N);
    }

    Matrix cyc = out.M_B.inverse() * out.M_A.inverse() * out.M_B * out.M_A;
    for (const auto& M : out.M_k) cyc *= M;
    out.cyclic_residual = (cyc - Matrix::Identity(N, N)).cwiseAbs().maxCoeff();
    return out;
}

CMTrajectory cm_flow(const CMPoint& start, cplx tau_end, double tol, int store_samples) {
    const cplx tau0 = start.tau.tau;
    const cplx dtau = tau_end - tau0;
    const cplx m = start.m;

    auto rhs = [&](double t, const Matrix& y) -> Matrix {
        const cplx tau = tau0 + t * dtau;
        if (!(tau.imag() > 0.0)) throw DomainError("cm_flow: left the upper half-plane");
        const ModularParameter mp(tau);
        const cplx Q = y(0, 0), P = y(1, 0);
        if (lattice_distance(2.0 * Q, tau) < 1e-4)
            throw CollisionWithPole("cm_flow: 2Q(tau) within 1e-4 of the lattice");
        Matrix d(4, 1);
        const cplx two_pi_i = 2.0 * kPi * kI;
        if (m == 0.0) {
            d(0, 0) = P / two_pi_i;
            d(1, 0) = 0.0;
            d(2, 0) = 0.0;
            d(3, 0) = P * P / two_pi_i;
        } else {
            const WeierstrassValue w = weierstrass_p(2.0 * Q, mp);
            d(0, 0) = P / two_pi_i;
            d(1, 0) = m * m * w.p_prime / two_pi_i;
            d(2, 0) = -2.0 * m * w.p / two_pi_i;
            d(3, 0) = (P * P - m * m * w.p + 4.0 * kPi * kI * m * m * dlog_eta_dtau(mp)) / two_pi_i;
        }
        return dtau * d;
    };

    CMTrajectory traj;
    traj.ode_tolerance = tol;
    Matrix y(4, 1);
    y << start.Q, start.P, cplx(0.0), cplx(0.0);
    traj.samples.push_back({tau0, start.P, start.Q, 0.0, 0.0});
    for (int s = 1; s < store_samples; ++s) {
        const double t0 = double(s - 1) / (store_samples - 1);
        const double t1 = double(s) / (store_samples - 1);
        auto sub = [&](double t, const Matrix& yy) { return rhs(t0 + t * (t1 - t0), yy) * (t1 - t0); };
        dopri5(sub, y, tol);
        traj.samples.push_back({tau0 + t1 * dtau, y(1, 0), y(0, 0), y(2, 0), y(3, 0)});
    }
    return traj;
}

cplx extract_g(const Matrix& G) {
    Matrix G0(2, 2);
    G0 << 1, -1, 1, 1;
    const Matrix D = G * G0.inverse();
    const double offdiag = std::max(std::abs(D(0, 1)), std::abs(D(1, 0)));
    const double scale = std::max(std::abs(D(0, 0)), std::abs(D(1, 1)));
    if (offdiag > 1e-8 * scale)
        throw InvariantViolation("extract_g: G is not of the form D * G0 with D diagonal");
    return std::log(D(0, 0) / D(1, 1));
}

cplx unwrap_g(cplx g, cplx prev) {
    const double k = std::round((prev - g).imag() / (2.0 * kPi));
    return g + 2.0 * kPi * kI * k;
}

} // namespace elliptau
