#include "delam/materials.hpp"

#include <cmath>
#include <stdexcept>

namespace delam {

IsotropicTensor isotropic_tensor(double lambda, double mu)
{
    if (!(mu > 0.0) || !(lambda + mu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu))
        throw std::invalid_argument("isotropic tensor requires mu > 0 and lambda + mu > 0");
    IsotropicTensor c;
    c.lambda_ = lambda;
    c.mu_ = mu;
    return c;
}

Sym2 IsotropicTensor::apply(const Sym2& eta) const
{
    return lambda_ * eta.trace() * Sym2::Identity() + 2.0 * mu_ * eta;
}

double IsotropicTensor::contract(const Sym2& eta) const
{
    return (apply(eta).array() * eta.array()).sum();
}

Eigen::Matrix3d IsotropicTensor::mandel() const
{
    Eigen::Matrix3d m;
    m << lambda_ + 2.0 * mu_, lambda_, 0.0,
         lambda_, lambda_ + 2.0 * mu_, 0.0,
         0.0, 0.0, 2.0 * mu_;
    return m;
}

Eigen::Matrix3d IsotropicTensor::voigt() const
{
    Eigen::Matrix3d m;
    m << lambda_ + 2.0 * mu_, lambda_, 0.0,
         lambda_, lambda_ + 2.0 * mu_, 0.0,
         0.0, 0.0, mu_;
    return m;
}

std::string to_string(CoefficientScaling s)
{
    return s == CoefficientScaling::Constant ? "constant" : "one_over_k";
}

CoefficientScaling scaling_from_string(const std::string& name)
{
    if (name == "constant")
        return CoefficientScaling::Constant;
    if (name == "one_over_k")
        return CoefficientScaling::OneOverK;
    throw std::invalid_argument("unknown coefficient scaling '" + name + "'");
}

double TimeProfile::value(double t) const
{
    switch (kind) {
    case Kind::Constant: return amplitude;
    case Kind::Ramp: return amplitude * t;
    case Kind::Sine: return amplitude * std::sin(omega * t + phase);
    }
    return 0.0;
}

double TimeProfile::rate(double t) const
{
    switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Ramp: return amplitude;
    case Kind::Sine: return amplitude * omega * std::cos(omega * t + phase);
    }
    return 0.0;
}

namespace {

template <class Match, class Eval>
Vec2 accumulate(const std::vector<LoadTerm>& terms, Match match, Eval eval)
{
    Vec2 out = Vec2::Zero();
    for (const auto& term : terms) {
        if (match(term.target))
            out += eval(term.profile) * term.direction;
    }
    return out;
}

auto body_matcher(Block block)
{
    return [block](const LoadTarget& target) {
        const auto* body = std::get_if<BodyTarget>(&target);
        return body && body->block == block;
    };
}

auto edge_matcher(EdgeTag edge)
{
    return [edge](const LoadTarget& target) {
        const auto* trac = std::get_if<TractionTarget>(&target);
        return trac && trac->edge == edge;
    };
}

}  // namespace

Vec2 LoadSchedule::body_force(double t, Block block) const
{
    return accumulate(terms_, body_matcher(block), [t](const TimeProfile& p) { return p.value(t); });
}

Vec2 LoadSchedule::body_force_rate(double t, Block block) const
{
    return accumulate(terms_, body_matcher(block), [t](const TimeProfile& p) { return p.rate(t); });
}

Vec2 LoadSchedule::traction(double t, EdgeTag edge) const
{
    return accumulate(terms_, edge_matcher(edge), [t](const TimeProfile& p) { return p.value(t); });
}

Vec2 LoadSchedule::traction_rate(double t, EdgeTag edge) const
{
    return accumulate(terms_, edge_matcher(edge), [t](const TimeProfile& p) { return p.rate(t); });
}

void validate(const ModelParams& params)
{
    if (!(params.rho > 0.0))
        throw std::invalid_argument("mass density must be positive");
    if (!(params.a0 >= 0.0) || !(params.a1 >= 0.0) || !(params.b >= 0.0))
        throw std::invalid_argument("interface coefficients a0, a1, b must be non-negative");
    if (!(params.k >= 1.0))
        throw std::invalid_argument("adhesive stiffness k must be at least 1");
    // Re-check the tensors in case they were default-constructed.
    isotropic_tensor(params.elastic.lambda(), params.elastic.mu());
    isotropic_tensor(params.viscous.lambda(), params.viscous.mu());
}

InterfaceCoefficients effective_coeffs(const ModelParams& params)
{
    if (params.scaling == CoefficientScaling::Constant)
        return {params.a0, params.a1, params.b};
    return {params.a0 / params.k, params.a1 / params.k, params.b / params.k};
}

InterfaceCoefficients brittle_coeffs(const ModelParams& params)
{
    if (params.scaling == CoefficientScaling::Constant)
        return {params.a0, params.a1, params.b};
    return {0.0, 0.0, 0.0};
}

}  // namespace delam
