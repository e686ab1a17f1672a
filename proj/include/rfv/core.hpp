/// @file core.hpp
/// @brief Shared vector types, error hierarchy and execution policy.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rfv {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or missing configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// State outside the invariant domain (nonpositive density, energy, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inverted, degenerate or non-conforming geometry.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Bad function argument (graph size, level count, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Residuals or fluxes violating a conservation condition.
class ConservationError : public Error {
public:
    ConservationError(const std::string& what, double defect)
        : Error(what), defect_(defect) {}
    double defect() const { return defect_; }

private:
    double defect_;
};

/// Time step above the stability bound.
class TimeStepError : public Error {
public:
    using Error::Error;
};

/// Linear algebra failure inside a solver (singular nodal matrix, ...).
class SolverError : public Error {
public:
    using Error::Error;
};

/// Vacuum generated by the exact Riemann problem.
class VacuumError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Kernels take an execution policy; `serial` is the reference path.
enum class Exec { serial, parallel };

/// Reads RFV_THREADS (0 or unset: OpenMP default) and applies it to OpenMP;
/// returns the thread count in use. Throws ConfigError for other values.
int configure_threads();

/// 2D cross product (z component).
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// a × e_z.
inline Vec2 cross_ez(const Vec2& a) { return Vec2(a.y(), -a.x()); }

}  // namespace rfv
