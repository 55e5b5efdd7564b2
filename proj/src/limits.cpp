#include "delam/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "delam/energies.hpp"

namespace delam {

ExtReal support_distance(const InterfaceField& z_a, const InterfaceField& z_b)
{
    require_same_chain(z_a, z_b, "support_distance");
    const int n = z_a.size();
    if (z_a.bonded_count() == 0)
        return 0.0;
    if (z_b.bonded_count() == 0)
        return ExtReal::infinity();

    std::vector<double> x(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i) + 1] = x[static_cast<std::size_t>(i)] + z_a.lengths()[static_cast<std::size_t>(i)];

    // Nearest bonded facet of z_b to the left and right of every facet.
    std::vector<int> left(static_cast<std::size_t>(n), -1), right(static_cast<std::size_t>(n), -1);
    for (int i = 0, last = -1; i < n; ++i) {
        left[static_cast<std::size_t>(i)] = last;
        if (z_b.bonded(i))
            last = i;
    }
    for (int i = n - 1, last = -1; i >= 0; --i) {
        right[static_cast<std::size_t>(i)] = last;
        if (z_b.bonded(i))
            last = i;
    }

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!z_a.bonded(i) || z_b.bonded(i))
            continue;
        const auto s = static_cast<std::size_t>(i);
        const double x0 = x[s], x1 = x[s + 1];
        const int l = left[s], r = right[s];
        double d = 0.0;
        if (l >= 0 && r >= 0) {
            const double xl = x[static_cast<std::size_t>(l) + 1];
            const double xr = x[static_cast<std::size_t>(r)];
            const double mid = 0.5 * (xl + xr);
            if (mid >= x0 && mid <= x1)
                d = 0.5 * (xr - xl);
            else
                d = std::max(std::min(x0 - xl, xr - x0), std::min(x1 - xl, xr - x1));
        } else if (l >= 0) {
            d = x1 - x[static_cast<std::size_t>(l) + 1];
        } else {
            d = x[static_cast<std::size_t>(r)] - x0;
        }
        worst = std::max(worst, d);
    }
    return worst;
}

std::vector<BrittleResidual> brittle_residuals(const Trajectory& traj)
{
    std::vector<BrittleResidual> out;
    out.reserve(traj.ledger.size());
    for (const LedgerRow& r : traj.ledger)
        out.push_back({r.step, r.t, r.adhesive, r.max_bonded_jump});
    return out;
}

namespace {

std::vector<int> uniform_samples(int n_steps, int samples)
{
    std::vector<int> out;
    for (int j = 1; j <= samples; ++j) {
        const int s = static_cast<int>(std::lround(static_cast<double>(j) * n_steps / samples));
        if (s >= 1 && (out.empty() || s > out.back()))
            out.push_back(s);
    }
    return out;
}

void run_member(const SweepSetup& setup, double k, const std::vector<int>& sample_steps, SweepMember& m)
{
    m.k = k;
    ModelParams params = setup.params;
    params.k = k;
    validate(params);
    Discretization disc(build_two_block_mesh(setup.mesh), params);
    const Mesh2D& mesh = disc.mesh();

    EvolutionOptions opts = setup.evolution;
    opts.keep_history = true;
    opts.on_row = nullptr;
    const Vec zero = Vec::Zero(mesh.num_dofs());
    InterfaceField z0 = setup.z0.empty() ? InterfaceField::constant(mesh, true)
                                         : InterfaceField::from_ints(setup.z0, mesh.facet_lengths());
    Evolution ev(disc, opts, zero, zero, std::move(z0));
    ev.run();
    const Trajectory& traj = ev.trajectory();
    const EnergyLedger& ledger = traj.ledger;

    const InterfaceCoefficients c = effective_coeffs(params);
    const double tol = opts.semistab_tol < 0.0 ? default_semistab_tol(disc) : opts.semistab_tol;
    m.semistable_all = true;
    m.unidirectional = true;
    const LedgerRow& first = ledger.front();
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < ledger.size(); ++n) {
        const LedgerRow& r = ledger[n];
        m.sup_adhesive = std::max(m.sup_adhesive, r.adhesive);
        m.sup_max_jump = std::max(m.sup_max_jump, r.max_bonded_jump);
        m.sup_perimeter = std::max(m.sup_perimeter, r.perimeter_count);
        m.ri_variation_total += n > 0 ? r.ri_increment : 0.0;
        m.semistable_all = m.semistable_all && r.semistab_violation >= -tol;
        bound = std::max(bound, first.kinetic + first.stored_total + r.work_exact - r.load_potential);
        if (n > 0) {
            const InterfaceField& zp = traj.interface_states[n - 1];
            const InterfaceField& zn = traj.interface_states[n];
            if (!(zn == zp))
                m.change_steps.push_back(static_cast<int>(n));
            m.unidirectional = m.unidirectional && zn.is_below(zp);
        }
    }
    m.energy_bound = bound + c.a0 * mesh.interface_length();
    m.audit = audit_all_pairs(ledger);

    double variation = 0.0;
    std::size_t next = 0;
    for (std::size_t n = 0; n < ledger.size() && next < sample_steps.size(); ++n) {
        if (n > 0)
            variation += ledger[n].ri_increment;
        if (static_cast<int>(n) != sample_steps[next])
            continue;
        const LedgerRow& r = ledger[n];
        SweepSample s;
        s.step = r.step;
        s.t = r.t;
        s.adhesive = r.adhesive;
        s.max_jump = r.max_bonded_jump;
        s.stored_energy = r.stored_total;
        s.ri_variation = variation;
        s.perimeter = r.perimeter_count;
        s.bonded_length = r.bonded_length;
        s.support = traj.interface_states[n].values();
        m.samples.push_back(std::move(s));
        ++next;
    }
    m.ledger = ledger;
    m.ok = true;
}

}  // namespace

SweepReport run_sweep(const SweepSetup& setup, const std::vector<double>& k_values, const SweepOptions& options)
{
    if (k_values.empty())
        throw std::invalid_argument("run_sweep: empty k list");
    for (std::size_t i = 1; i < k_values.size(); ++i) {
        if (!(k_values[i] > k_values[i - 1]))
            throw std::invalid_argument("run_sweep: k values must be strictly increasing");
    }
    if (options.samples < 1)
        throw std::invalid_argument("run_sweep: need at least one sample time");

    SweepReport rep;
    rep.scaling = setup.params.scaling;
    rep.k_values = k_values;
    rep.reference_index = static_cast<int>(k_values.size()) - 1;
    const Mesh2D probe = build_two_block_mesh(setup.mesh);
    rep.facet_length = 0.0;
    for (double l : probe.facet_lengths())
        rep.facet_length = std::max(rep.facet_length, l);
    const int n_steps =
        static_cast<int>(std::floor(setup.evolution.horizon / setup.evolution.tau + 1e-9));
    rep.sample_steps = uniform_samples(n_steps, options.samples);
    for (int s : rep.sample_steps)
        rep.sample_times.push_back(s * setup.evolution.tau);
    rep.members.resize(k_values.size());

    unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(k_values.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < k_values.size(); i = next++) {
            SweepMember& m = rep.members[i];
            try {
                run_member(setup, k_values[i], rep.sample_steps, m);
            } catch (const std::exception& e) {
                m = SweepMember{};
                m.k = k_values[i];
                m.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    rep.complete = std::all_of(rep.members.begin(), rep.members.end(), [](const SweepMember& m) { return m.ok; });

    // Exclusion windows around interface changes of any member.
    rep.excluded.assign(rep.sample_steps.size(), false);
    for (std::size_t j = 0; j < rep.sample_steps.size(); ++j) {
        for (const SweepMember& m : rep.members) {
            for (int c : m.change_steps) {
                if (std::abs(c - rep.sample_steps[j]) <= options.exclusion_steps)
                    rep.excluded[j] = true;
            }
        }
    }

    const SweepMember& ref = rep.members[static_cast<std::size_t>(rep.reference_index)];
    for (SweepMember& m : rep.members) {
        if (!m.ok)
            continue;
        rep.uniform_energy_bound = std::max(rep.uniform_energy_bound, m.energy_bound);
        if (!ref.ok)
            continue;
        for (std::size_t j = 0; j < m.samples.size(); ++j) {
            const auto& lengths = probe.facet_lengths();
            const InterfaceField za(m.samples[j].support, lengths);
            const InterfaceField zb(ref.samples[j].support, lengths);
            m.samples[j].support_distance = support_distance(za, zb);
        }
    }
    return rep;
}

SweepAssessment assess_sweep(const SweepReport& rep)
{
    SweepAssessment a;
    if (!rep.complete) {
        a.notes.push_back("incomplete sweep: at least one member failed");
        return a;
    }
    const auto& ms = rep.members;
    const std::size_t nk = ms.size();

    a.energy_bounded = true;
    for (const SweepMember& m : ms)
        a.energy_bounded = a.energy_bounded && m.sup_adhesive <= rep.uniform_energy_bound;

    double jump_scale = 0.0;
    for (const SweepMember& m : ms)
        jump_scale = std::max(jump_scale, m.sup_max_jump);
    a.jump_decay = true;
    for (std::size_t i = 1; i < nk; ++i)
        a.jump_decay = a.jump_decay && ms[i].sup_max_jump <= ms[i - 1].sup_max_jump + 1e-3 * jump_scale;

    // Least-squares slope over members with a positive jump.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (const SweepMember& m : ms) {
            if (m.sup_max_jump <= 0.0)
                continue;
            const double lx = std::log(m.k), ly = std::log(m.sup_max_jump);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        const double den = cnt * sxx - sx * sx;
        a.jump_slope = cnt >= 2 && den > 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
    }

    a.support_monotone = true;
    a.energy_gaps.assign(nk > 0 ? nk - 1 : 0, 0.0);
    a.variation_gaps.assign(nk > 0 ? nk - 1 : 0, 0.0);
    double scale = 0.0;
    for (std::size_t j = 0; j < rep.sample_steps.size(); ++j) {
        if (rep.excluded[j]) {
            ++a.excluded_samples;
            continue;
        }
        ++a.compared_samples;
        for (std::size_t i = 0; i < nk; ++i) {
            const SweepSample& s = ms[i].samples[j];
            scale = std::max({scale, std::abs(s.stored_energy), std::abs(s.ri_variation)});
            if (i == 0)
                continue;
            const SweepSample& p = ms[i - 1].samples[j];
            const bool mono = s.support_distance <= p.support_distance + ExtReal(rep.facet_length);
            if (!mono) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "support distance grows from k=%g to k=%g at t=%g", ms[i - 1].k,
                              ms[i].k, s.t);
                a.notes.emplace_back(buf);
            }
            a.support_monotone = a.support_monotone && mono;
            a.energy_gaps[i - 1] = std::max(a.energy_gaps[i - 1], std::abs(s.stored_energy - p.stored_energy));
            a.variation_gaps[i - 1] = std::max(a.variation_gaps[i - 1], std::abs(s.ri_variation - p.ri_variation));
        }
    }
    if (a.compared_samples == 0) {
        a.support_monotone = false;
        a.notes.emplace_back("every sample time is excluded; support and Cauchy checks are vacuous");
    }
    const double slack = 1e-12 * scale;
    a.cauchy = a.compared_samples > 0;
    for (std::size_t i = 1; i + 1 < nk; ++i) {
        a.cauchy = a.cauchy && a.energy_gaps[i] <= a.energy_gaps[i - 1] + slack;
        a.cauchy = a.cauchy && a.variation_gaps[i] <= a.variation_gaps[i - 1] + slack;
    }
    return a;
}

namespace {

nlohmann::json ext_json(const ExtReal& x)
{
    if (x.is_infinite())
        return "inf";
    return x.value();
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string sweep_report_json(const SweepReport& rep, const SweepAssessment& a)
{
    nlohmann::json j;
    j["scaling"] = to_string(rep.scaling);
    j["k_values"] = rep.k_values;
    j["reference_index"] = rep.reference_index;
    j["sample_steps"] = rep.sample_steps;
    j["sample_times"] = rep.sample_times;
    j["excluded"] = rep.excluded;
    j["facet_length"] = rep.facet_length;
    j["uniform_energy_bound"] = rep.uniform_energy_bound;
    j["complete"] = rep.complete;
    nlohmann::json members = nlohmann::json::array();
    for (const SweepMember& m : rep.members) {
        nlohmann::json mj;
        mj["k"] = m.k;
        mj["ok"] = m.ok;
        if (!m.ok) {
            mj["error"] = m.error;
            members.push_back(mj);
            continue;
        }
        mj["sup_adhesive"] = m.sup_adhesive;
        mj["sup_max_jump"] = m.sup_max_jump;
        mj["sup_perimeter"] = m.sup_perimeter;
        mj["energy_bound"] = m.energy_bound;
        mj["ri_variation_total"] = m.ri_variation_total;
        mj["semistable_all"] = m.semistable_all;
        mj["unidirectional"] = m.unidirectional;
        mj["change_steps"] = m.change_steps;
        mj["audit"] = {{"max_residual", m.audit.max_residual},
                       {"max_abs_residual", m.audit.max_abs_residual},
                       {"max_exact_residual", m.audit.max_exact_residual}};
        nlohmann::json samples = nlohmann::json::array();
        for (const SweepSample& s : m.samples) {
            samples.push_back({{"step", s.step},
                               {"t", s.t},
                               {"adhesive", s.adhesive},
                               {"max_jump", s.max_jump},
                               {"support_distance", ext_json(s.support_distance)},
                               {"stored_energy", s.stored_energy},
                               {"ri_variation", s.ri_variation},
                               {"perimeter", s.perimeter},
                               {"bonded_length", s.bonded_length},
                               {"support", std::vector<int>(s.support.begin(), s.support.end())}});
        }
        mj["samples"] = samples;
        members.push_back(mj);
    }
    j["members"] = members;
    j["assessment"] = {{"energy_bounded", a.energy_bounded},
                       {"jump_decay", a.jump_decay},
                       {"support_monotone", a.support_monotone},
                       {"cauchy", a.cauchy},
                       {"compared_samples", a.compared_samples},
                       {"excluded_samples", a.excluded_samples},
                       {"jump_slope", a.jump_slope},
                       {"energy_gaps", a.energy_gaps},
                       {"variation_gaps", a.variation_gaps},
                       {"notes", a.notes}};
    return j.dump(1) + "\n";
}

std::map<std::string, std::string> sweep_report_csv(const SweepReport& rep)
{
    using Getter = std::string (*)(const SweepSample&);
    const std::vector<std::pair<std::string, Getter>> metrics = {
        {"adhesive", [](const SweepSample& s) { return fmt(s.adhesive); }},
        {"max_jump", [](const SweepSample& s) { return fmt(s.max_jump); }},
        {"support_distance", [](const SweepSample& s) { return s.support_distance.to_string(); }},
        {"stored_energy", [](const SweepSample& s) { return fmt(s.stored_energy); }},
        {"ri_variation", [](const SweepSample& s) { return fmt(s.ri_variation); }},
        {"perimeter", [](const SweepSample& s) { return std::to_string(s.perimeter); }},
        {"bonded_length", [](const SweepSample& s) { return fmt(s.bonded_length); }},
    };
    std::map<std::string, std::string> out;
    for (const auto& [name, get] : metrics) {
        std::ostringstream os;
        os << "step,t,excluded";
        for (double k : rep.k_values)
            os << ",k=" << fmt(k);
        os << '\n';
        for (std::size_t j = 0; j < rep.sample_steps.size(); ++j) {
            os << rep.sample_steps[j] << ',' << fmt(rep.sample_times[j]) << ',' << (rep.excluded[j] ? 1 : 0);
            for (const SweepMember& m : rep.members)
                os << ',' << (m.ok && j < m.samples.size() ? get(m.samples[j]) : std::string("nan"));
            os << '\n';
        }
        out[name] = os.str();
    }
    return out;
}

}  // namespace delam
