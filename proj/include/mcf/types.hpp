#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcf {

using Real = double;

// Ambient dimension of every catalog flow is at most 3; 4 leaves headroom for
// transformed user specs without touching the heap in inner loops.
inline constexpr int kMaxAmbient = 4;

using AmbientVec = Eigen::Matrix<Real, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;
using TangentMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, 2>;
using SmallMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

template <class Scalar = Real>
constexpr Scalar pi()
{
    return Scalar(3.14159265358979323846264338327950288L);
}

inline AmbientVec vec1(Real x)
{
    AmbientVec v(1);
    v << x;
    return v;
}

inline AmbientVec vec2(Real x, Real y)
{
    AmbientVec v(2);
    v << x, y;
    return v;
}

inline AmbientVec vec3(Real x, Real y, Real z)
{
    AmbientVec v(3);
    v << x, y, z;
    return v;
}

inline AmbientVec zero_vec(int n)
{
    return AmbientVec::Zero(n);
}

struct Interval {
    Real lo = 0;
    Real hi = 0;

    Real length() const { return hi - lo; }
    bool empty() const { return !(lo < hi); }
};

// log(cosh x) without overflow
inline Real log_cosh(Real x)
{
    const Real a = std::abs(x);
    return a + std::log1p(std::exp(-2 * a)) - Real(0.6931471805599453094172321214581766L);
}

// log(sinh x) for x > 0 without overflow
inline Real log_sinh(Real x)
{
    return x + std::log1p(-std::exp(-2 * x)) - Real(0.6931471805599453094172321214581766L);
}

// asinh(exp(w) * s) for s >= 0, stable when w is large
inline Real asinh_scaled_exp(Real w, Real s)
{
    if (s <= 0)
        return 0;
    const Real lw = w + std::log(s);
    if (lw > 34)
        return lw + Real(0.6931471805599453094172321214581766L);
    return std::asinh(std::exp(lw));
}

// volume of the unit ball in R^n
inline Real unit_ball_volume(int n)
{
    return std::pow(pi<Real>(), Real(0.5) * n) / std::tgamma(Real(0.5) * n + 1);
}

} // namespace mcf
