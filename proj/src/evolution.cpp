#include "delam/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "delam/energies.hpp"

namespace delam {

std::string to_string(StepOrder order)
{
    return order == StepOrder::UThenZ ? "u_then_z" : "z_then_u";
}

StepOrder step_order_from_string(const std::string& name)
{
    if (name == "u_then_z")
        return StepOrder::UThenZ;
    if (name == "z_then_u")
        return StepOrder::ZThenU;
    throw std::invalid_argument("unknown step order '" + name + "'");
}

const std::vector<std::string>& ledger_columns()
{
    static const std::vector<std::string> cols = {
        "step",           "t",          "kinetic",        "viscous_increment", "ri_increment",
        "stored_bulk",    "load_potential", "adhesive",   "surface_linear",    "perimeter_term",
        "stored_total",   "power",      "power_integral", "work_exact",        "bonded_length",
        "perimeter_count", "semistab_violation", "perimeter_margin", "max_bonded_jump"};
    return cols;
}

namespace {

int step_count(double horizon, double tau)
{
    if (!(tau > 0.0))
        throw std::invalid_argument("time step must be positive");
    if (!(horizon >= tau))
        throw std::invalid_argument("horizon must be at least one time step");
    return static_cast<int>(std::floor(horizon / tau + 1e-9));
}

void require_dirichlet_zero(const Mesh2D& mesh, const Vec& u, const char* what)
{
    if (u.size() != mesh.num_dofs())
        throw std::invalid_argument(std::string(what) + " does not match the dof count");
    for (int d : mesh.dirichlet_dofs()) {
        if (u[d] != 0.0)
            throw std::invalid_argument(std::string(what) + " violates the Dirichlet condition at dof " +
                                        std::to_string(d));
    }
}

}  // namespace

Evolution::Evolution(const Discretization& disc, EvolutionOptions options)
    : disc_(&disc), options_(std::move(options)), stepper_(disc, options_.tau, options_.solve)
{
    step_count(options_.horizon, options_.tau);
    traj_.tau = options_.tau;
}

Evolution::Evolution(const Discretization& disc, EvolutionOptions options, const Vec& u0, const Vec& u1,
                     InterfaceField z0)
    : Evolution(disc, std::move(options))
{
    const Mesh2D& mesh = disc.mesh();
    require_dirichlet_zero(mesh, u0, "u0");
    require_dirichlet_zero(mesh, u1, "u1");
    if (z0.size() != mesh.num_facets())
        throw std::invalid_argument("z0 does not match the facet chain");

    const SemistabilityReport cert = certify_semistability(disc, 0.0, u0, z0, options_.semistab_tol);
    if (!cert.ok) {
        if (options_.init_mode == InitMode::Strict) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "initial interface state is not semistable (worst violation %.6g)",
                          cert.worst_violation);
            throw InitError(buf);
        }
        z0 = update_interface(disc, u0, z0);
        repaired_ = true;
    }

    state_ = KinematicState::from_initial(u0, u1, options_.tau);
    z_ = std::move(z0);
    traj_.u_before_start = state_.u_prev;
    record(make_row(state_.u_prev, z_, true));
}

Evolution Evolution::resume(const Discretization& disc, EvolutionOptions options, const Checkpoint& cp)
{
    if (cp.tau != options.tau)
        throw std::invalid_argument("checkpoint time step differs from the configured one");
    Evolution ev(disc, std::move(options));
    require_dirichlet_zero(disc.mesh(), cp.u, "checkpoint u");
    require_dirichlet_zero(disc.mesh(), cp.u_prev, "checkpoint u_prev");
    if (cp.z.size() != disc.mesh().num_facets())
        throw std::invalid_argument("checkpoint interface state does not match the facet chain");
    ev.state_.u = cp.u;
    ev.state_.u_prev = cp.u_prev;
    ev.state_.u_prev2 = cp.u_prev2;
    ev.state_.t = cp.t;
    ev.z_ = cp.z;
    ev.step_ = cp.step;
    ev.power_integral_ = cp.power_integral;
    ev.work_exact_ = cp.work_exact;
    ev.traj_.u_before_start = cp.u_prev;
    // The increments of the seed row are not part of any audit pair.
    ev.record(ev.make_row(cp.u_prev, cp.z, true));
    return ev;
}

bool Evolution::done() const
{
    return step_ >= step_count(options_.horizon, options_.tau);
}

LedgerRow ledger_row(const Discretization& disc, const LedgerInputs& in)
{
    const Vec& u = *in.u;
    const InterfaceField& z = *in.z;
    LedgerRow r;
    r.step = in.step;
    r.t = in.t;
    const Vec incr = u - *in.u_old;
    r.kinetic = kinetic(disc, incr / in.tau);
    r.viscous_increment = in.seed ? 0.0 : 2.0 * in.tau * viscous_rate(disc, incr / in.tau);
    r.ri_increment = in.seed ? 0.0 : ri_dissipation(z, *in.z_old, effective_coeffs(disc.params()).a1).value();
    const StoredEnergyParts parts = stored_energy_parts(disc, r.t, u, z);
    r.stored_bulk = parts.bulk;
    r.load_potential = parts.load_potential;
    r.adhesive = parts.adhesive;
    r.surface_linear = parts.surface_linear;
    r.perimeter_term = parts.perimeter_term;
    r.stored_total = parts.total();
    r.power = power(disc, r.t, u);
    r.power_integral = in.power_integral;
    r.work_exact = in.work_exact;
    r.bonded_length = z.bonded_length();
    r.perimeter_count = perimeter(z);
    const SemistabilityReport cert = certify_semistability(disc, r.t, u, z, in.semistab_tol);
    r.semistab_violation = cert.worst_violation;
    r.perimeter_margin = cert.empty_competitor_margin;
    r.max_bonded_jump = max_bonded_jump_norm(disc.mesh(), u, z);
    return r;
}

LedgerRow Evolution::make_row(const Vec& u_old, const InterfaceField& z_old, bool seed) const
{
    LedgerInputs in;
    in.step = step_;
    in.t = state_.t;
    in.tau = options_.tau;
    in.u = &state_.u;
    in.u_old = &u_old;
    in.z = &z_;
    in.z_old = &z_old;
    in.power_integral = power_integral_;
    in.work_exact = work_exact_;
    in.semistab_tol = options_.semistab_tol;
    in.seed = seed;
    return ledger_row(*disc_, in);
}

void Evolution::record(const LedgerRow& row)
{
    if (options_.on_row)
        options_.on_row(row);
    traj_.ledger.push_back(row);
    if (options_.keep_history || traj_.times.empty()) {
        traj_.times.push_back(state_.t);
        traj_.displacements.push_back(state_.u);
        traj_.interface_states.push_back(z_);
    } else {
        traj_.times.back() = state_.t;
        traj_.displacements.back() = state_.u;
        traj_.interface_states.back() = z_;
    }
}

void Evolution::step()
{
    if (done())
        throw std::logic_error("step: time horizon reached");
    const Discretization& disc = *disc_;
    const double tau = options_.tau;
    const int n = step_ + 1;
    const double t_new = n * tau;
    const double t_old = state_.t;

    const InterfaceField z_old = z_;
    Vec u_new;
    if (options_.order == StepOrder::UThenZ) {
        u_new = stepper_.solve(z_old, state_, t_new);
        z_ = update_interface(disc, u_new, z_old);
    } else {
        z_ = update_interface(disc, state_.u, z_old);
        u_new = stepper_.solve(z_, state_, t_new);
    }

    const Vec u_old = state_.u;
    work_exact_ -= (disc.load(t_new) - disc.load(t_old)).dot(u_old);
    power_integral_ += tau * power(disc, t_new, u_new);

    state_.advance(std::move(u_new), t_new);
    step_ = n;
    record(make_row(u_old, z_old, false));
}

void Evolution::run()
{
    while (!done())
        step();
}

Checkpoint Evolution::checkpoint() const
{
    Checkpoint cp;
    cp.step = step_;
    cp.t = state_.t;
    cp.tau = options_.tau;
    cp.u = state_.u;
    cp.u_prev = state_.u_prev;
    cp.u_prev2 = state_.u_prev2;
    cp.z = z_;
    cp.power_integral = power_integral_;
    cp.work_exact = work_exact_;
    return cp;
}

namespace {

nlohmann::json vec_json(const Vec& v)
{
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec json_vec(const nlohmann::json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& cp)
{
    nlohmann::json j;
    j["format"] = "delam-checkpoint";
    j["version"] = Checkpoint::format_version;
    j["step"] = cp.step;
    j["t"] = cp.t;
    j["tau"] = cp.tau;
    j["u"] = vec_json(cp.u);
    j["u_prev"] = vec_json(cp.u_prev);
    j["u_prev2"] = vec_json(cp.u_prev2);
    j["z"] = std::vector<int>(cp.z.values().begin(), cp.z.values().end());
    j["lengths"] = cp.z.lengths();
    j["power_integral"] = cp.power_integral;
    j["work_exact"] = cp.work_exact;
    return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("checkpoint: ") + e.what());
    }
    if (j.value("format", std::string()) != "delam-checkpoint")
        throw std::invalid_argument("checkpoint: not a checkpoint document");
    const int version = j.at("version").get<int>();
    if (version != Checkpoint::format_version)
        throw std::invalid_argument("checkpoint: unsupported format version " + std::to_string(version));
    try {
        Checkpoint cp;
        cp.step = j.at("step").get<int>();
        cp.t = j.at("t").get<double>();
        cp.tau = j.at("tau").get<double>();
        cp.u = json_vec(j.at("u"));
        cp.u_prev = json_vec(j.at("u_prev"));
        cp.u_prev2 = json_vec(j.at("u_prev2"));
        cp.z = InterfaceField::from_ints(j.at("z").get<std::vector<int>>(), j.at("lengths").get<std::vector<double>>());
        cp.power_integral = j.at("power_integral").get<double>();
        cp.work_exact = j.at("work_exact").get<double>();
        return cp;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("checkpoint: ") + e.what());
    }
}

EnergyLedger recompute_ledger(const Discretization& disc, const Trajectory& traj, double semistab_tol)
{
    const int n_steps = traj.num_steps();
    if (static_cast<int>(traj.displacements.size()) != n_steps + 1 ||
        static_cast<int>(traj.interface_states.size()) != n_steps + 1)
        throw std::invalid_argument("recompute_ledger: trajectory history was not kept");
    EnergyLedger out;
    double power_integral = traj.ledger.empty() ? 0.0 : traj.ledger.front().power_integral;
    double work = traj.ledger.empty() ? 0.0 : traj.ledger.front().work_exact;
    const int first_step = traj.ledger.empty() ? 0 : traj.ledger.front().step;
    for (int n = 0; n <= n_steps; ++n) {
        const auto s = static_cast<std::size_t>(n);
        const Vec& u_old = n == 0 ? traj.u_before_start : traj.displacements[s - 1];
        if (n > 0) {
            work -= (disc.load(traj.times[s]) - disc.load(traj.times[s - 1])).dot(u_old);
            power_integral += traj.tau * power(disc, traj.times[s], traj.displacements[s]);
        }
        LedgerInputs in;
        in.step = first_step + n;
        in.t = traj.times[s];
        in.tau = traj.tau;
        in.u = &traj.displacements[s];
        in.u_old = &u_old;
        in.z = &traj.interface_states[s];
        in.z_old = n == 0 ? in.z : &traj.interface_states[s - 1];
        in.power_integral = power_integral;
        in.work_exact = work;
        in.semistab_tol = semistab_tol;
        in.seed = n == 0;
        out.push_back(ledger_row(disc, in));
    }
    return out;
}

TrajectoryCheck check_trajectory(const Discretization& disc, const Trajectory& traj, double semistab_tol)
{
    TrajectoryCheck c;
    const double tol = semistab_tol < 0.0 ? default_semistab_tol(disc) : semistab_tol;
    const bool full = traj.displacements.size() == traj.ledger.size() && traj.ledger.size() == traj.times.size();
    c.history_available = full;
    const AuditSummary audit = audit_all_pairs(traj.ledger);
    c.max_exact_residual = audit.max_exact_residual;
    c.max_residual = audit.max_residual;
    c.energy_inequality = audit.max_exact_residual <= 1e-9 * std::max(1.0, audit.energy_scale);
    c.semistable = true;
    c.perimeter_bound = true;
    for (const LedgerRow& r : traj.ledger) {
        c.semistable = c.semistable && r.semistab_violation >= -tol;
        c.perimeter_bound = c.perimeter_bound && r.perimeter_margin >= -tol;
    }
    c.unidirectional = true;
    for (std::size_t n = 1; n < traj.interface_states.size(); ++n)
        c.unidirectional = c.unidirectional && traj.interface_states[n].is_below(traj.interface_states[n - 1]);
    c.dirichlet_zero = true;
    for (const Vec& u : traj.displacements) {
        for (int d : disc.mesh().dirichlet_dofs())
            c.dirichlet_zero = c.dirichlet_zero && u[d] == 0.0;
    }
    c.ledger_consistent = true;
    if (full) {
        const EnergyLedger fresh = recompute_ledger(disc, traj, semistab_tol);
        const double scale = std::max(1.0, audit.energy_scale);
        for (std::size_t n = 0; n < fresh.size(); ++n) {
            const LedgerRow& a = fresh[n];
            const LedgerRow& b = traj.ledger[n];
            const double d = std::max({std::abs(a.kinetic - b.kinetic), std::abs(a.stored_total - b.stored_total),
                                       std::abs(a.viscous_increment - b.viscous_increment),
                                       std::abs(a.ri_increment - b.ri_increment),
                                       std::abs(a.power_integral - b.power_integral),
                                       std::abs(a.work_exact - b.work_exact)});
            c.max_ledger_mismatch = std::max(c.max_ledger_mismatch, d);
            c.semistable = c.semistable && a.semistab_violation >= -tol;
        }
        c.ledger_consistent = c.max_ledger_mismatch <= 1e-9 * scale;
    }
    return c;
}

AuditResult audit_energy(const EnergyLedger& ledger, int s, int n)
{
    if (s < 0 || s > n || n >= static_cast<int>(ledger.size()))
        throw std::out_of_range("audit_energy: need 0 <= s <= n < ledger size");
    const LedgerRow& a = ledger[static_cast<std::size_t>(s)];
    const LedgerRow& b = ledger[static_cast<std::size_t>(n)];
    double dissipated = 0.0;
    for (int m = s + 1; m <= n; ++m) {
        const LedgerRow& r = ledger[static_cast<std::size_t>(m)];
        dissipated += r.viscous_increment + r.ri_increment;
    }
    AuditResult res;
    res.lhs = b.kinetic + dissipated + b.stored_total;
    res.rhs = a.kinetic + a.stored_total + (b.power_integral - a.power_integral);
    res.residual = res.lhs - res.rhs;
    return res;
}

AuditSummary audit_all_pairs(const EnergyLedger& ledger)
{
    AuditSummary sum;
    if (ledger.empty())
        return sum;
    // residual(s, n) = D(n) - D(s) with D the running total below, so pair
    // extremes follow from running minima and maxima.
    double dissipated = 0.0;
    double run_min = 0.0, run_max = 0.0, run_min_exact = 0.0;
    for (std::size_t m = 0; m < ledger.size(); ++m) {
        const LedgerRow& r = ledger[m];
        if (m > 0)
            dissipated += r.viscous_increment + r.ri_increment;
        const double base = r.kinetic + r.stored_total + dissipated;
        const double d = base - r.power_integral;
        const double d_exact = base - r.work_exact;
        if (m == 0) {
            run_min = run_max = d;
            run_min_exact = d_exact;
        }
        sum.max_residual = std::max(sum.max_residual, d - run_min);
        sum.max_abs_residual = std::max({sum.max_abs_residual, d - run_min, run_max - d});
        sum.max_exact_residual = std::max(sum.max_exact_residual, d_exact - run_min_exact);
        run_min = std::min(run_min, d);
        run_max = std::max(run_max, d);
        run_min_exact = std::min(run_min_exact, d_exact);
        sum.energy_scale = std::max(sum.energy_scale, std::abs(r.stored_total) + r.kinetic);
    }
    return sum;
}

std::vector<Vec> replay_displacements(const Discretization& disc, const Trajectory& traj, StepOrder order,
                                      const SolveOptions& solve)
{
    const int n_steps = traj.num_steps();
    if (static_cast<int>(traj.displacements.size()) != n_steps + 1 ||
        static_cast<int>(traj.interface_states.size()) != n_steps + 1)
        throw std::invalid_argument("replay_displacements: trajectory history was not kept");
    MomentumStepper stepper(disc, traj.tau, solve);
    KinematicState state;
    state.u = traj.displacements.front();
    state.u_prev = traj.u_before_start;
    state.u_prev2 = traj.u_before_start;
    state.t = traj.times.front();

    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(n_steps + 1));
    out.push_back(state.u);
    for (int n = 1; n <= n_steps; ++n) {
        const auto idx = static_cast<std::size_t>(order == StepOrder::UThenZ ? n - 1 : n);
        Vec u = stepper.solve(traj.interface_states[idx], state, traj.times[static_cast<std::size_t>(n)]);
        out.push_back(u);
        state.advance(std::move(u), traj.times[static_cast<std::size_t>(n)]);
    }
    return out;
}

}  // namespace delam
