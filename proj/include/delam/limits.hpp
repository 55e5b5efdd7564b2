#pragma once

#include <map>
#include <string>
#include <vector>

#include "delam/evolution.hpp"
#include "delam/ext_real.hpp"

namespace delam {

/// One-sided distance along the contact chain: the smallest rho such that the
/// bonded set of z_a lies within rho of the bonded set of z_b. 0 when z_a has
/// no bonded facet; +infinity when z_a has one and z_b has none.
ExtReal support_distance(const InterfaceField& z_a, const InterfaceField& z_b);

struct BrittleResidual {
    int step = 0;
    double t = 0.0;
    double adhesive = 0.0;  // J_k(u_k, z_k)
    double max_jump = 0.0;  // largest facet L2 jump norm on {z_k = 1}
};

/// Per time level of the trajectory ledger.
std::vector<BrittleResidual> brittle_residuals(const Trajectory& traj);

/// Data shared by all sweep members. params.k is replaced per member; the
/// initial data is u0 = u1 = 0 and z0 (all bonded when empty).
struct SweepSetup {
    MeshSpec mesh;
    ModelParams params;
    EvolutionOptions evolution;
    std::vector<int> z0;
};

struct SweepOptions {
    int samples = 10;
    /// Sample steps within this many steps of an interface change of any
    /// member are excluded from the support and Cauchy comparisons.
    int exclusion_steps = 2;
    /// 0 selects the hardware concurrency.
    int threads = 0;
};

struct SweepSample {
    int step = 0;
    double t = 0.0;
    double adhesive = 0.0;
    double max_jump = 0.0;
    ExtReal support_distance;  // to the reference member
    double stored_energy = 0.0;
    double ri_variation = 0.0;  // R-dissipation accumulated up to t
    int perimeter = 0;
    double bonded_length = 0.0;
    std::vector<std::uint8_t> support;
};

struct SweepMember {
    double k = 0.0;
    bool ok = false;
    std::string error;
    std::vector<SweepSample> samples;
    std::vector<int> change_steps;  // steps n with z_n != z_{n-1}
    double sup_adhesive = 0.0;
    double sup_max_jump = 0.0;
    int sup_perimeter = 0;
    /// Ledger bound on sup_n J_k from the discrete energy inequality.
    double energy_bound = 0.0;
    double ri_variation_total = 0.0;
    bool semistable_all = false;
    bool unidirectional = false;
    AuditSummary audit;
    EnergyLedger ledger;
};

struct SweepReport {
    CoefficientScaling scaling = CoefficientScaling::Constant;
    std::vector<double> k_values;
    int reference_index = -1;
    std::vector<int> sample_steps;
    std::vector<double> sample_times;
    std::vector<bool> excluded;
    double facet_length = 0.0;
    double uniform_energy_bound = 0.0;  // C_E = max_k energy_bound
    bool complete = false;
    std::vector<SweepMember> members;
};

/// Runs one trajectory per k (concurrently) on identical data and assembles
/// the diagnostics at uniform sample times. A failing member leaves ok =
/// false with its message and marks the report incomplete.
SweepReport run_sweep(const SweepSetup& setup, const std::vector<double>& k_values, const SweepOptions& options = {});

/// Pass/fail of the sweep diagnostics.
struct SweepAssessment {
    bool energy_bounded = false;     // sup_t J_k <= C_E for all k
    bool jump_decay = false;         // sup jump on support nonincreasing in k
    bool support_monotone = false;   // rho(k, t) nonincreasing in k within one facet
    bool cauchy = false;             // consecutive gaps of E_k and Var_R decrease
    int compared_samples = 0;
    int excluded_samples = 0;
    double jump_slope = 0.0;         // least-squares slope of log sup-jump vs log k
    std::vector<double> energy_gaps;
    std::vector<double> variation_gaps;
    std::vector<std::string> notes;

    bool ok() const { return energy_bounded && jump_decay && support_monotone && cauchy; }
};

SweepAssessment assess_sweep(const SweepReport& report);

std::string sweep_report_json(const SweepReport& report, const SweepAssessment& assessment);

/// Flat CSV tables keyed by metric name; one row per sample time, one column
/// per k.
std::map<std::string, std::string> sweep_report_csv(const SweepReport& report);

}  // namespace delam
