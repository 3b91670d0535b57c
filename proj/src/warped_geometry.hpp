#pragma once

// Internal: second-order finite-difference geometry of a 2d base metric on a
// uniform (u, v) lattice, templated on the scalar so the wing solver can run
// it with dual numbers. Parity handling matches the symmetric extension of
// the fields: across the axis v = 0 phi and g_uv are odd and everything else
// even; the optional u-mirror at column 0 serves the half-grid solver.

#include <cmath>
#include <cstddef>

namespace soliton::detail {

template <class T>
struct FieldView {
    const T* a = nullptr;
    std::size_t nu = 0;
    int v_parity = +1;
    int u_parity = +1;
    bool u_mirror = false;

    T at(std::ptrdiff_t j, std::ptrdiff_t k) const {
        bool flip = false;
        if (k < 0) {
            k = -k;
            if (v_parity < 0) flip = !flip;
        }
        if (u_mirror && j < 0) {
            j = -j;
            if (u_parity < 0) flip = !flip;
        }
        const T val = a[static_cast<std::size_t>(k) * nu + static_cast<std::size_t>(j)];
        return flip ? -val : val;
    }
};

template <class T>
struct Deriv2 {
    T w, du, dv, duu, dvv, duv;
};

template <class T>
Deriv2<T> derivatives(const FieldView<T>& f, std::ptrdiff_t j, std::ptrdiff_t k,
                      double hu, double hv) {
    Deriv2<T> d;
    d.w = f.at(j, k);
    d.du = (f.at(j + 1, k) - f.at(j - 1, k)) / (2.0 * hu);
    d.dv = (f.at(j, k + 1) - f.at(j, k - 1)) / (2.0 * hv);
    d.duu = (f.at(j + 1, k) - 2.0 * d.w + f.at(j - 1, k)) / (hu * hu);
    d.dvv = (f.at(j, k + 1) - 2.0 * d.w + f.at(j, k - 1)) / (hv * hv);
    d.duv = (f.at(j + 1, k + 1) - f.at(j + 1, k - 1) - f.at(j - 1, k + 1) + f.at(j - 1, k - 1)) /
            (4.0 * hu * hv);
    return d;
}

template <class T>
T det3(T a00, T a01, T a02, T a10, T a11, T a12, T a20, T a21, T a22) {
    return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
           a02 * (a10 * a21 - a11 * a20);
}

// Pointwise data of g_N: inverse metric, Christoffel symbols, Gauss curvature
// (Brioschi formula).
template <class T>
struct BaseGeom {
    Deriv2<T> E, F, G;
    T det, iE, iF, iG;
    T K;
    T Guu_u, Guu_v; // Gamma^u_{uu}, Gamma^v_{uu}
    T Guv_u, Guv_v;
    T Gvv_u, Gvv_v;
};

template <class T>
BaseGeom<T> base_geometry(const FieldView<T>& e, const FieldView<T>& f, const FieldView<T>& g,
                          std::ptrdiff_t j, std::ptrdiff_t k, double hu, double hv) {
    BaseGeom<T> b;
    b.E = derivatives(e, j, k, hu, hv);
    b.F = derivatives(f, j, k, hu, hv);
    b.G = derivatives(g, j, k, hu, hv);

    b.det = b.E.w * b.G.w - b.F.w * b.F.w;
    b.iE = b.G.w / b.det;
    b.iF = -b.F.w / b.det;
    b.iG = b.E.w / b.det;

    const T half(0.5);
    const T m1 = det3(-half * b.E.dvv + b.F.duv - half * b.G.duu, half * b.E.du,
                      b.F.du - half * b.E.dv, b.F.dv - half * b.G.du, b.E.w, b.F.w,
                      half * b.G.dv, b.F.w, b.G.w);
    const T m2 = det3(T(0.0), half * b.E.dv, half * b.G.du, half * b.E.dv, b.E.w, b.F.w,
                      half * b.G.du, b.F.w, b.G.w);
    b.K = (m1 - m2) / (b.det * b.det);

    const T cuu = T(2.0) * b.F.du - b.E.dv;
    const T cvv = T(2.0) * b.F.dv - b.G.du;
    b.Guu_u = half * (b.iE * b.E.du + b.iF * cuu);
    b.Guu_v = half * (b.iF * b.E.du + b.iG * cuu);
    b.Guv_u = half * (b.iE * b.E.dv + b.iF * b.G.du);
    b.Guv_v = half * (b.iF * b.E.dv + b.iG * b.G.du);
    b.Gvv_u = half * (b.iE * cvv + b.iF * b.G.dv);
    b.Gvv_v = half * (b.iF * cvv + b.iG * b.G.dv);
    return b;
}

template <class T>
struct Hessian2 {
    T uu, uv, vv;
    T lap; // g^{ij} H_ij
};

template <class T>
Hessian2<T> hessian(const BaseGeom<T>& b, const Deriv2<T>& p) {
    Hessian2<T> h;
    h.uu = p.duu - b.Guu_u * p.du - b.Guu_v * p.dv;
    h.uv = p.duv - b.Guv_u * p.du - b.Guv_v * p.dv;
    h.vv = p.dvv - b.Gvv_u * p.du - b.Gvv_v * p.dv;
    h.lap = b.iE * h.uu + T(2.0) * b.iF * h.uv + b.iG * h.vv;
    return h;
}

template <class T>
T grad_inner(const BaseGeom<T>& b, const Deriv2<T>& p, const Deriv2<T>& q) {
    return b.iE * p.du * q.du + b.iF * (p.du * q.dv + p.dv * q.du) + b.iG * p.dv * q.dv;
}

// Eigenvalues of a symmetric bilinear form relative to the metric, ascending.
inline void rel_eigenvalues(double det_g, double iE, double iF, double iG, double huu, double huv,
                            double hvv, double& lo, double& hi) {
    const double tr = iE * huu + 2.0 * iF * huv + iG * hvv;
    const double dt = (huu * hvv - huv * huv) / det_g;
    double disc = tr * tr - 4.0 * dt;
    disc = disc > 0.0 ? std::sqrt(disc) : 0.0;
    lo = 0.5 * (tr - disc);
    hi = 0.5 * (tr + disc);
}

} // namespace soliton::detail
