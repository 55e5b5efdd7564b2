#include "delam/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace delam {

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    return buf;
}

void write_ledger_header(std::ostream& os)
{
    const auto& cols = ledger_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << cols[i];
    os << '\n';
}

void write_ledger_row(std::ostream& os, const LedgerRow& r)
{
    os << r.step;
    for (double x : {r.t, r.kinetic, r.viscous_increment, r.ri_increment, r.stored_bulk, r.load_potential, r.adhesive,
                     r.surface_linear, r.perimeter_term, r.stored_total, r.power, r.power_integral, r.work_exact,
                     r.bonded_length})
        os << ',' << format_number(x);
    os << ',' << r.perimeter_count;
    for (double x : {r.semistab_violation, r.perimeter_margin, r.max_bonded_jump})
        os << ',' << format_number(x);
    os << '\n';
}

std::string ledger_csv(const EnergyLedger& ledger)
{
    std::ostringstream os;
    write_ledger_header(os);
    for (const LedgerRow& r : ledger)
        write_ledger_row(os, r);
    return os.str();
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

nlohmann::json row_json(const LedgerRow& r)
{
    return {{"step", r.step},
            {"t", r.t},
            {"kinetic", r.kinetic},
            {"viscous_increment", r.viscous_increment},
            {"ri_increment", r.ri_increment},
            {"stored_bulk", r.stored_bulk},
            {"load_potential", r.load_potential},
            {"adhesive", r.adhesive},
            {"surface_linear", r.surface_linear},
            {"perimeter_term", r.perimeter_term},
            {"stored_total", r.stored_total},
            {"power", r.power},
            {"power_integral", r.power_integral},
            {"work_exact", r.work_exact},
            {"bonded_length", r.bonded_length},
            {"perimeter_count", r.perimeter_count},
            {"semistab_violation", r.semistab_violation},
            {"perimeter_margin", r.perimeter_margin},
            {"max_bonded_jump", r.max_bonded_jump}};
}

LedgerRow json_row(const nlohmann::json& j)
{
    LedgerRow r;
    r.step = j.at("step").get<int>();
    r.t = j.at("t").get<double>();
    r.kinetic = j.at("kinetic").get<double>();
    r.viscous_increment = j.at("viscous_increment").get<double>();
    r.ri_increment = j.at("ri_increment").get<double>();
    r.stored_bulk = j.at("stored_bulk").get<double>();
    r.load_potential = j.at("load_potential").get<double>();
    r.adhesive = j.at("adhesive").get<double>();
    r.surface_linear = j.at("surface_linear").get<double>();
    r.perimeter_term = j.at("perimeter_term").get<double>();
    r.stored_total = j.at("stored_total").get<double>();
    r.power = j.at("power").get<double>();
    r.power_integral = j.at("power_integral").get<double>();
    r.work_exact = j.at("work_exact").get<double>();
    r.bonded_length = j.at("bonded_length").get<double>();
    r.perimeter_count = j.at("perimeter_count").get<int>();
    r.semistab_violation = j.at("semistab_violation").get<double>();
    r.perimeter_margin = j.at("perimeter_margin").get<double>();
    r.max_bonded_jump = j.at("max_bonded_jump").get<double>();
    return r;
}

}  // namespace

std::string trajectory_to_json(const Trajectory& traj, const std::string& config_text)
{
    nlohmann::json j;
    j["format"] = "delam-trajectory";
    j["version"] = 1;
    j["config"] = config_text;
    j["tau"] = traj.tau;
    j["times"] = traj.times;
    j["u_before_start"] = vec_json(traj.u_before_start);
    nlohmann::json us = nlohmann::json::array();
    for (const Vec& u : traj.displacements)
        us.push_back(vec_json(u));
    j["displacements"] = us;
    nlohmann::json zs = nlohmann::json::array();
    for (const InterfaceField& z : traj.interface_states)
        zs.push_back(std::vector<int>(z.values().begin(), z.values().end()));
    j["interface_states"] = zs;
    j["lengths"] = traj.interface_states.empty() ? std::vector<double>{} : traj.interface_states.front().lengths();
    nlohmann::json rows = nlohmann::json::array();
    for (const LedgerRow& r : traj.ledger)
        rows.push_back(row_json(r));
    j["ledger"] = rows;
    return j.dump() + "\n";
}

Trajectory trajectory_from_json(const std::string& text, std::string* config_text)
{
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        if (j.value("format", std::string()) != "delam-trajectory")
            throw std::invalid_argument("not a trajectory document");
        if (j.at("version").get<int>() != 1)
            throw std::invalid_argument("unsupported trajectory version");
        Trajectory t;
        t.tau = j.at("tau").get<double>();
        t.times = j.at("times").get<std::vector<double>>();
        t.u_before_start = json_vec(j.at("u_before_start"));
        for (const auto& u : j.at("displacements"))
            t.displacements.push_back(json_vec(u));
        const auto lengths = j.at("lengths").get<std::vector<double>>();
        for (const auto& z : j.at("interface_states"))
            t.interface_states.push_back(InterfaceField::from_ints(z.get<std::vector<int>>(), lengths));
        for (const auto& r : j.at("ledger"))
            t.ledger.push_back(json_row(r));
        if (config_text)
            *config_text = j.at("config").get<std::string>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("trajectory: ") + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace delam
