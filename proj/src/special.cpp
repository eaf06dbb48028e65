#include "elliptau/special.hpp"

#include <algorithm>
#include <cmath>

namespace elliptau {

namespace {

// One term of the theta_1 sin-series at summation index n >= 0:
//   2 (-1)^n exp(i pi tau (n+1/2)^2) * d^order/dz^order sin((2n+1) pi z).
cplx theta1_term(int n, cplx z, cplx tau, int order) {
    const double half = n + 0.5;
    const cplx qpow = std::exp(kI * kPi * tau * half * half);
    const double freq = (2 * n + 1) * kPi;
    const cplx arg = freq * z;
    cplx osc;
    switch (order) {
        case 0: osc = std::sin(arg); break;
        case 1: osc = freq * std::cos(arg); break;
        case 2: osc = -freq * freq * std::sin(arg); break;
        case 3: osc = -freq * freq * freq * std::cos(arg); break;
        default: throw DomainError("theta1: order must be in 0..3");
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return 2.0 * sign * qpow * osc;
}

} // namespace

cplx theta1(cplx z, const ModularParameter& tau, int order, const SeriesControl& ctl) {
    if (order < 0 || order > 3) throw DomainError("theta1: order must be in 0..3");
    cplx sum = 0.0;
    double last = 0.0;
    for (int n = 0; n < ctl.max_terms; ++n) {
        const cplx term = theta1_term(n, z, tau.tau, order);
        sum += term;
        const double mag = std::abs(term);
        if (n > 0 && mag < ctl.tail_tolerance && mag <= last) return sum;
        last = mag;
    }
    throw NonConvergent("theta1: series did not converge within max_terms");
}

cplx dedekind_eta(const ModularParameter& tau, const SeriesControl& ctl) {
    const cplx q = tau.nome();
    cplx prod = 1.0;
    cplx qn = 1.0;
    for (int n = 1; n <= ctl.max_terms; ++n) {
        qn *= q;
        prod *= (1.0 - qn);
        if (std::abs(qn) < ctl.tail_tolerance)
            return std::exp(2.0 * kPi * kI * tau.tau / 24.0) * prod;
    }
    throw NonConvergent("dedekind_eta: product did not converge within max_terms");
}

cplx dlog_eta_dtau(const ModularParameter& tau, const SeriesControl& ctl) {
    const cplx q = tau.nome();
    cplx sum = 0.0;
    cplx qn = 1.0;
    for (int n = 1; n <= ctl.max_terms; ++n) {
        qn *= q;
        const cplx term = double(n) * qn / (1.0 - qn);
        sum += term;
        if (std::abs(term) < ctl.tail_tolerance)
            return kI * kPi / 12.0 - 2.0 * kPi * kI * sum;
    }
    throw NonConvergent("dlog_eta_dtau: series did not converge within max_terms");
}

double lattice_distance(cplx z, cplx tau) {
    // Reduce z = u + v tau with u, v real, then measure the nearest corner.
    const double det = tau.imag();
    const double v = z.imag() / det;
    const double u = z.real() - v * tau.real();
    const double uf = u - std::round(u);
    const double vf = v - std::round(v);
    double best = std::abs(uf + vf * tau);
    for (int du = -1; du <= 1; ++du)
        for (int dv = -1; dv <= 1; ++dv)
            best = std::min(best, std::abs((uf + du) + (vf + dv) * tau));
    return best;
}

cplx wp_theta(cplx z, const ModularParameter& tau, const SeriesControl& ctl) {
    if (lattice_distance(z, tau.tau) < 1e-8)
        throw PoleAtLatticePoint("wp_theta: z on the lattice");
    const cplx t0 = theta1(z, tau, 0, ctl);
    const cplx t1 = theta1(z, tau, 1, ctl);
    const cplx t2 = theta1(z, tau, 2, ctl);
    const cplx r1 = t1 / t0;
    return -(t2 / t0 - r1 * r1);
}

WeierstrassValue weierstrass_p(cplx z, const ModularParameter& tau, const SeriesControl& ctl) {
    if (lattice_distance(z, tau.tau) < 1e-8)
        throw PoleAtLatticePoint("weierstrass_p: z on the lattice");
    const cplx t0 = theta1(z, tau, 0, ctl);
    const cplx t1 = theta1(z, tau, 1, ctl);
    const cplx t2 = theta1(z, tau, 2, ctl);
    const cplx t3 = theta1(z, tau, 3, ctl);
    const cplx r1 = t1 / t0;
    // The additive constant cancels the z^0 term of -(log theta1)'':
    // it equals +theta1'''(0)/(3 theta1'(0)) = 4 pi i dlog eta/dtau.
    const cplx c0 = theta1(0.0, tau, 3, ctl) / theta1(0.0, tau, 1, ctl) / 3.0;
    WeierstrassValue w;
    w.p = -(t2 / t0 - r1 * r1) + c0;
    // d/dz of -(t2/t0 - (t1/t0)^2)
    w.p_prime = -(t3 / t0 - 3.0 * t2 * t1 / (t0 * t0) + 2.0 * r1 * r1 * r1);
    return w;
}

LameValue lame(cplx xi, cplx z, const ModularParameter& tau, const SeriesControl& ctl) {
    const cplx t = tau.tau;
    if (lattice_distance(z, t) < 1e-8 || lattice_distance(xi, t) < 1e-8 ||
        lattice_distance(z - xi, t) < 1e-8)
        throw PoleAtLatticePoint("lame: argument on the lattice");
    const cplx tp0 = theta1(0.0, tau, 1, ctl);
    const cplx tz = theta1(z, tau, 0, ctl);
    const cplx txi = theta1(xi, tau, 0, ctl);
    const cplx tzmxi = theta1(z - xi, tau, 0, ctl);
    const cplx tpzmxi = theta1(z - xi, tau, 1, ctl);
    const cplx tpxi = theta1(xi, tau, 1, ctl);
    LameValue out;
    out.x = tzmxi * tp0 / (tz * txi);
    out.y = tp0 / tz * (-tpzmxi / txi - tzmxi * tpxi / (txi * txi));
    return out;
}

} // namespace elliptau
