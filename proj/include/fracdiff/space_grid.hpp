#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fracdiff {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform 1D interval [0, L] or tensor-product rectangle [0,Lx]x[0,Ly].
struct SpaceGrid {
    int dimension = 1;
    std::array<std::size_t, 2> n = {0, 0}; // nodes per axis
    std::array<double, 2> length = {1.0, 0.0};

    static SpaceGrid interval(double L, std::size_t nodes) {
        if (!(L > 0.0)) throw std::invalid_argument("SpaceGrid: length must be positive");
        if (nodes < 3) throw std::invalid_argument("SpaceGrid: need at least 3 nodes per axis");
        SpaceGrid g;
        g.dimension = 1;
        g.n = {nodes, 1};
        g.length = {L, 0.0};
        return g;
    }

    static SpaceGrid rectangle(double Lx, double Ly, std::size_t nx, std::size_t ny) {
        if (!(Lx > 0.0 && Ly > 0.0)) throw std::invalid_argument("SpaceGrid: lengths must be positive");
        if (nx < 3 || ny < 3) throw std::invalid_argument("SpaceGrid: need at least 3 nodes per axis");
        SpaceGrid g;
        g.dimension = 2;
        g.n = {nx, ny};
        g.length = {Lx, Ly};
        return g;
    }

    double h(int axis) const { return length[axis] / static_cast<double>(n[axis] - 1); }
    std::size_t size() const { return dimension == 1 ? n[0] : n[0] * n[1]; }

    Point node(std::size_t p) const {
        if (dimension == 1) return {static_cast<double>(p) * h(0), 0.0};
        return {static_cast<double>(p % n[0]) * h(0), static_cast<double>(p / n[0]) * h(1)};
    }

    bool on_boundary(std::size_t p) const {
        if (dimension == 1) return p == 0 || p == n[0] - 1;
        const std::size_t i = p % n[0], j = p / n[0];
        return i == 0 || i == n[0] - 1 || j == 0 || j == n[1] - 1;
    }
};

using ScalarField = std::function<double(const Point&)>;          // x only
using TimeField = std::function<double(const Point&, double)>;    // (x, t)

inline ScalarField const_field(double v) {
    return [v](const Point&) { return v; };
}
inline TimeField const_tfield(double v) {
    return [v](const Point&, double) { return v; };
}

/// Coefficients of -div(a grad u) + lower-order terms with Robin closure.
/// `a` is the scalar (isotropic) diffusion coefficient, `b` the drift,
/// `c` the zeroth-order coefficient of the full operator, `b0` the positive
/// zeroth-order coefficient of the A1 variant, `sigma` the Robin coefficient
/// on the boundary, and `c0` the constant shift defining A0.
struct CoefficientSet {
    ScalarField a = const_field(1.0);
    std::array<TimeField, 2> b = {const_tfield(0.0), const_tfield(0.0)};
    TimeField c = const_tfield(0.0);
    TimeField b0 = const_tfield(1.0);
    ScalarField sigma = const_field(0.0);
    double c0 = 0.0;
};

} // namespace fracdiff
