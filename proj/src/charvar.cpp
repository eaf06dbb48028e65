#include "elliptau/charvar.hpp"

#include <cmath>

namespace elliptau {

namespace {

cplx sinc_ratio_guard(cplx x) {
    if (std::abs(std::sin(x)) < 1e-8)
        throw DegenerateParametrization("charvar: sin factor vanishes");
    return std::sin(x);
}

} // namespace

void DarbouxPoint::validate() const {
    sinc_ratio_guard(2.0 * kPi * a);
    for (const cplx s : {2.0 * a + m, 2.0 * a - m}) {
        const cplx d = s - std::round(s.real());
        if (std::abs(d) < 1e-8)
            throw DegenerateParametrization("DarbouxPoint: 2a +- m within 1e-8 of an integer");
    }
}

Rep rep_from_darboux(const DarbouxPoint& d) {
    d.validate();
    Rep out;
    out.M_A = Matrix::Zero(2, 2);
    out.M_A(0, 0) = std::exp(2.0 * kPi * kI * d.a);
    out.M_A(1, 1) = std::exp(-2.0 * kPi * kI * d.a);

    const cplx s2a = std::sin(2.0 * kPi * d.a);
    const cplx sm = std::sin(kPi * d.m);
    const cplx sminus = std::sin(kPi * (2.0 * d.a - d.m));
    const cplx splus = std::sin(kPi * (2.0 * d.a + d.m));
    const cplx ep = std::exp(kI * d.nu / 2.0);
    const cplx em = std::exp(-kI * d.nu / 2.0);
    out.M_B = Matrix(2, 2);
    out.M_B << em * sminus, ep * sm, -em * sm, ep * splus;
    out.M_B /= s2a;

    out.M_0 = out.M_A.inverse() * out.M_B.inverse() * out.M_A * out.M_B;

    // Eigenvector matrix of M_0 with the e^{c sigma3} normalization freedom.
    Eigen::ComplexEigenSolver<Matrix> es(out.M_0);
    const cplx target = std::exp(2.0 * kPi * kI * d.m);
    Matrix C(2, 2);
    if (std::abs(es.eigenvalues()(0) - target) < std::abs(es.eigenvalues()(1) - target)) {
        C.col(0) = es.eigenvectors().col(0);
        C.col(1) = es.eigenvectors().col(1);
    } else {
        C.col(0) = es.eigenvectors().col(1);
        C.col(1) = es.eigenvectors().col(0);
    }
    const cplx det = C.determinant();
    C /= std::sqrt(det);
    Matrix expc = Matrix::Zero(2, 2);
    expc(0, 0) = std::exp(d.c);
    expc(1, 1) = std::exp(-d.c);
    out.C_0 = C * expc;
    return out;
}

TraceCoordinates trace_coordinates(const Matrix& M_A, const Matrix& M_B) {
    TraceCoordinates t;
    t.p_A = M_A.trace();
    t.p_B = M_B.trace();
    t.p_AB = (M_A * M_B).trace();
    t.p_0 = (M_A.inverse() * M_B.inverse() * M_A * M_B).trace();
    t.fricke_residual = std::abs(t.p_A * t.p_A + t.p_B * t.p_B + t.p_AB * t.p_AB -
                                 t.p_A * t.p_B * t.p_AB - t.p_0 - 2.0);
    return t;
}

namespace {

cplx trace_value(const DarbouxPoint& d, TraceCoord which) {
    const Rep r = rep_from_darboux(d);
    switch (which) {
        case TraceCoord::p_A: return r.M_A.trace();
        case TraceCoord::p_B: return r.M_B.trace();
        case TraceCoord::p_AB: return (r.M_A * r.M_B).trace();
    }
    return 0.0;
}

} // namespace

cplx goldman_bracket(const DarbouxPoint& d, TraceCoord f, TraceCoord g, double h) {
    if (h < 1e-6 || h > 1e-4) throw DomainError("goldman_bracket: h must lie in [1e-6, 1e-4]");
    auto deriv = [&](TraceCoord which, bool in_a) {
        DarbouxPoint plus = d, minus = d;
        (in_a ? plus.a : plus.nu) += h;
        (in_a ? minus.a : minus.nu) -= h;
        return (trace_value(plus, which) - trace_value(minus, which)) / (2.0 * h);
    };
    const cplx fa = deriv(f, true), fnu = deriv(f, false);
    const cplx ga = deriv(g, true), gnu = deriv(g, false);
    return (fa * gnu - fnu * ga) / (2.0 * kPi);
}

cplx nu_from_MB(const Matrix& M_B, cplx a, cplx m) {
    const cplx s2a = sinc_ratio_guard(2.0 * kPi * a);
    const cplx sminus = sinc_ratio_guard(kPi * (2.0 * a - m));
    return 2.0 * kI * std::log(M_B(0, 0) * s2a / sminus);
}

} // namespace elliptau
