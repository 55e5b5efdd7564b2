#pragma once

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "delam/geometry.hpp"

namespace delam {

using Sym2 = Eigen::Matrix2d;

/// Isotropic fourth-order tensor eta -> lambda tr(eta) I + 2 mu eta acting on
/// symmetric 2x2 matrices.
class IsotropicTensor {
public:
    IsotropicTensor() = default;

    double lambda() const { return lambda_; }
    double mu() const { return mu_; }

    Sym2 apply(const Sym2& eta) const;
    /// eta : C eta
    double contract(const Sym2& eta) const;
    /// Matrix of the tensor in Mandel notation (e11, e22, sqrt(2) e12).
    Eigen::Matrix3d mandel() const;
    /// Matrix acting on engineering strain (e11, e22, 2 e12); used in assembly.
    Eigen::Matrix3d voigt() const;

    /// Coercivity bounds: lower * |eta|^2 <= eta : C eta <= upper * |eta|^2.
    double lower_bound() const { return 2.0 * mu_ + 2.0 * std::min(lambda_, 0.0); }
    double upper_bound() const { return 2.0 * mu_ + 2.0 * std::max(lambda_, 0.0); }

    friend IsotropicTensor isotropic_tensor(double lambda, double mu);

private:
    double lambda_ = 0.0;
    double mu_ = 0.0;
};

/// Rejects moduli that do not give a positive definite tensor (mu > 0,
/// lambda + mu > 0).
IsotropicTensor isotropic_tensor(double lambda, double mu);

enum class CoefficientScaling { Constant, OneOverK };

std::string to_string(CoefficientScaling s);
CoefficientScaling scaling_from_string(const std::string& name);

/// Interface coefficients (a0, a1, b) as they enter energy and dissipation.
struct InterfaceCoefficients {
    double a0 = 0.0;
    double a1 = 0.0;
    double b = 0.0;
};

/// Scalar time profile with closed-form derivative.
struct TimeProfile {
    enum class Kind { Constant, Ramp, Sine };
    Kind kind = Kind::Constant;
    double amplitude = 1.0;  // constant value, ramp slope, or sine amplitude
    double omega = 0.0;
    double phase = 0.0;

    static TimeProfile constant(double value) { return {Kind::Constant, value, 0.0, 0.0}; }
    static TimeProfile ramp(double slope) { return {Kind::Ramp, slope, 0.0, 0.0}; }
    static TimeProfile sine(double amplitude, double omega, double phase = 0.0)
    {
        return {Kind::Sine, amplitude, omega, phase};
    }

    double value(double t) const;
    double rate(double t) const;
};

/// Where a load term acts: a uniform body force density on one block, or a
/// uniform traction on one Neumann edge set.
struct BodyTarget {
    Block block = Block::Plus;
};
struct TractionTarget {
    EdgeTag edge = EdgeTag::Top;
};
using LoadTarget = std::variant<BodyTarget, TractionTarget>;

struct LoadTerm {
    LoadTarget target;
    Vec2 direction = Vec2::Zero();
    TimeProfile profile;
};

/// Loading f(t) = sum_i profile_i(t) * g_i with each g_i a fixed body force
/// density or traction. Continuously differentiable in t by construction.
class LoadSchedule {
public:
    LoadSchedule() = default;
    explicit LoadSchedule(std::vector<LoadTerm> terms) : terms_(std::move(terms)) {}

    const std::vector<LoadTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Vec2 body_force(double t, Block block) const;
    Vec2 body_force_rate(double t, Block block) const;
    Vec2 traction(double t, EdgeTag edge) const;
    Vec2 traction_rate(double t, EdgeTag edge) const;

private:
    std::vector<LoadTerm> terms_;
};

struct ModelParams {
    double rho = 1.0;
    IsotropicTensor elastic = isotropic_tensor(1.0, 1.0);
    IsotropicTensor viscous = isotropic_tensor(0.0, 0.1);
    double a0 = 1.0;
    double a1 = 1.0;
    double b = 1.0;
    double k = 100.0;
    CoefficientScaling scaling = CoefficientScaling::Constant;
    LoadSchedule load;
};

/// Throws std::invalid_argument for non-physical parameters.
void validate(const ModelParams& params);

/// Coefficients (a0_k, a1_k, b_k) at the adhesive stiffness params.k.
InterfaceCoefficients effective_coeffs(const ModelParams& params);

/// Coefficients of the brittle limit: unchanged in the constant scaling,
/// zero in the 1/k scaling.
InterfaceCoefficients brittle_coeffs(const ModelParams& params);

}  // namespace delam
