#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delam/assembly.hpp"
#include "delam/interface.hpp"
#include "delam/momentum.hpp"

namespace delam {

enum class StepOrder { UThenZ, ZThenU };
enum class InitMode { Strict, Repair };

std::string to_string(StepOrder order);
StepOrder step_order_from_string(const std::string& name);

/// One ledger row per time level n (row 0 is the initial state).
struct LedgerRow {
    int step = 0;
    double t = 0.0;
    double kinetic = 0.0;            // K((u_n - u_{n-1}) / tau)
    double viscous_increment = 0.0;  // 2 tau V((u_n - u_{n-1}) / tau)
    double ri_increment = 0.0;       // R_k(z_n - z_{n-1})
    double stored_bulk = 0.0;
    double load_potential = 0.0;
    double adhesive = 0.0;
    double surface_linear = 0.0;
    double perimeter_term = 0.0;
    double stored_total = 0.0;       // E_k(t_n, u_n, z_n)
    double power = 0.0;              // -<f'(t_n), u_n>
    double power_integral = 0.0;     // sum_{m<=n} tau * power_m (right endpoints)
    double work_exact = 0.0;         // sum_{m<=n} -<f(t_m) - f(t_{m-1}), u_{m-1}>
    double bonded_length = 0.0;
    int perimeter_count = 0;
    double semistab_violation = 0.0; // worst_violation of the certificate
    double perimeter_margin = 0.0;
    double max_bonded_jump = 0.0;
};

/// Column order of the ledger CSV.
const std::vector<std::string>& ledger_columns();

using EnergyLedger = std::vector<LedgerRow>;

/// Inputs of one ledger row. A seed row (the first row of a run) carries no
/// increments.
struct LedgerInputs {
    int step = 0;
    double t = 0.0;
    double tau = 0.0;
    const Vec* u = nullptr;
    const Vec* u_old = nullptr;
    const InterfaceField* z = nullptr;
    const InterfaceField* z_old = nullptr;
    double power_integral = 0.0;
    double work_exact = 0.0;
    double semistab_tol = -1.0;
    bool seed = false;
};

LedgerRow ledger_row(const Discretization& disc, const LedgerInputs& in);

/// Full discrete trajectory. states[n] holds (u_n, z_n) at times[n] = n tau;
/// u_before_start is u_{-1} = u0 - tau u1.
struct Trajectory {
    double tau = 0.0;
    std::vector<double> times;
    std::vector<Vec> displacements;
    std::vector<InterfaceField> interface_states;
    Vec u_before_start;
    EnergyLedger ledger;

    int num_steps() const { return static_cast<int>(times.size()) - 1; }
};

struct EvolutionOptions {
    double tau = 0.01;
    double horizon = 1.0;
    StepOrder order = StepOrder::UThenZ;
    InitMode init_mode = InitMode::Strict;
    /// false keeps only the three-level window and the ledger.
    bool keep_history = true;
    /// Called with each ledger row as soon as it is computed.
    std::function<void(const LedgerRow&)> on_row;
    double semistab_tol = -1.0;
    SolveOptions solve;
};

class InitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Restart data; format version 1.
struct Checkpoint {
    static constexpr int format_version = 1;
    int step = 0;
    double t = 0.0;
    double tau = 0.0;
    Vec u;
    Vec u_prev;
    Vec u_prev2;
    InterfaceField z;
    double power_integral = 0.0;
    double work_exact = 0.0;
};

std::string checkpoint_to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const std::string& text);

/// Alternating minimization time loop: each step solves the displacement at
/// frozen interface state and then minimizes the interface state at frozen
/// displacement (or the reverse with StepOrder::ZThenU).
class Evolution {
public:
    /// Seeds the scheme with u0, u1, z0 and certifies semistability of z0 at
    /// t = 0. Strict mode throws InitError for non-semistable z0; repair mode
    /// replaces z0 by one interface minimization step.
    Evolution(const Discretization& disc, EvolutionOptions options, const Vec& u0, const Vec& u1, InterfaceField z0);

    static Evolution resume(const Discretization& disc, EvolutionOptions options, const Checkpoint& cp);

    bool done() const;
    void step();
    void run();

    const Trajectory& trajectory() const { return traj_; }
    Trajectory take_trajectory() { return std::move(traj_); }
    const KinematicState& state() const { return state_; }
    const InterfaceField& interface_state() const { return z_; }
    int step_index() const { return step_; }
    bool repaired_initial_state() const { return repaired_; }
    Checkpoint checkpoint() const;

private:
    Evolution(const Discretization& disc, EvolutionOptions options);
    LedgerRow make_row(const Vec& u_old, const InterfaceField& z_old, bool seed) const;
    void record(const LedgerRow& row);

    const Discretization* disc_;
    EvolutionOptions options_;
    MomentumStepper stepper_;
    KinematicState state_;
    InterfaceField z_;
    int step_ = 0;
    double power_integral_ = 0.0;
    double work_exact_ = 0.0;
    bool repaired_ = false;
    Trajectory traj_;
};

/// Energy-dissipation audit between time levels s <= n:
///   lhs = K(v_n) + sum_{s<m<=n} (2 tau V + R_k) + E_k(t_n)
///   rhs = K(v_s) + E_k(t_s) + sum_{s<m<=n} tau dE/dt(t_m, u_m)
struct AuditResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

AuditResult audit_energy(const EnergyLedger& ledger, int s, int n);

/// Extremes of the audit over all pairs s <= n, computed in linear time.
struct AuditSummary {
    double max_residual = 0.0;        // max over pairs of lhs - rhs
    double max_abs_residual = 0.0;    // max over pairs of |lhs - rhs|
    /// max over pairs of lhs minus the right-hand side with the exact
    /// left-endpoint work; the scheme makes this <= 0 up to rounding.
    double max_exact_residual = 0.0;
    double energy_scale = 0.0;        // max |E| + K over the ledger, for tolerances
};

AuditSummary audit_all_pairs(const EnergyLedger& ledger);

/// Ledger recomputed from the stored states of a trajectory with full history.
EnergyLedger recompute_ledger(const Discretization& disc, const Trajectory& traj, double semistab_tol = -1.0);

struct TrajectoryCheck {
    bool history_available = false;
    bool unidirectional = false;
    bool semistable = false;
    bool perimeter_bound = false;    // b_k P(Z) <= (a0_k + a1_k) |Z| at every level
    bool dirichlet_zero = false;
    bool energy_inequality = false;  // exact-work audit <= 0 up to rounding
    bool ledger_consistent = false;  // stored ledger matches a recomputation
    double max_exact_residual = 0.0;
    double max_residual = 0.0;
    double max_ledger_mismatch = 0.0;

    bool ok() const
    {
        return unidirectional && semistable && perimeter_bound && dirichlet_zero && energy_inequality &&
               ledger_consistent;
    }
};

/// Re-verifies the invariants of a trajectory. Without full history only the
/// ledger-based checks are meaningful.
TrajectoryCheck check_trajectory(const Discretization& disc, const Trajectory& traj, double semistab_tol = -1.0);

/// Re-solves the displacement sequence for a given interface history (z_n
/// used at step n as in the original run) on a possibly different
/// discretization. Returns u_0..u_N.
std::vector<Vec> replay_displacements(const Discretization& disc, const Trajectory& traj, StepOrder order,
                                      const SolveOptions& solve = {});

}  // namespace delam
