#include "odp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "odp/error.hpp"
#include "odp/format.hpp"

namespace odp {

namespace {

// JSON has no encoding for infinities or NaN.
nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json numbers(const std::vector<double>& xs) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

}  // namespace

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

nlohmann::json to_json(const Estimate& e) {
    return {{"mean", number(e.mean)},
            {"standard_error", number(e.standard_error)},
            {"ci95", {number(e.ci_low()), number(e.ci_high())}}};
}

nlohmann::json to_json(const SimStats& s) {
    nlohmann::json workers = nlohmann::json::array();
    for (const auto& w : s.workers)
        workers.push_back({{"rank", w.rank},
                           {"value", to_json(w.value)},
                           {"busy_fraction", to_json(w.busy_fraction)},
                           {"replication_values", numbers(w.replication_values)}});
    nlohmann::json out = {{"quantity", s.quantity},
                          {"value", to_json(s.value)},
                          {"replications", s.replications},
                          {"horizon", number(s.horizon)},
                          {"counts",
                           {{"arrivals", s.counts.arrivals},
                            {"accepted", s.counts.accepted},
                            {"lost_busy", s.counts.lost_busy},
                            {"lost_price", s.counts.lost_price}}},
                          {"workers", workers},
                          {"replication_values", numbers(s.replication_values)}};
    if (s.paths_per_replication) out["paths_per_replication"] = s.paths_per_replication;
    return out;
}

nlohmann::json to_json(const OptimalSolution& s) {
    nlohmann::json out = {{"prices", numbers(s.prices)},
                          {"rate", number(s.rate)},
                          {"iterations", s.iterations},
                          {"converged", s.converged}};
    if (s.discounted_value) out["discounted_value"] = number(*s.discounted_value);
    return out;
}

nlohmann::json to_json(const EquilibriumProfile& p) {
    nlohmann::json workers = nlohmann::json::array();
    for (const auto& w : p.workers)
        workers.push_back({{"rank", w.rank},
                           {"prices", numbers(w.prices)},
                           {"rate", number(w.rate)},
                           {"busy_fraction", number(w.busy_fraction)}});
    return {{"workers", workers}};
}

nlohmann::json to_json(const DynamicsReport& r) {
    nlohmann::json traj = nlohmann::json::array();
    for (const auto& profile : r.trajectory) traj.push_back(numbers(profile));
    return {{"fixed_point", r.fixed_point},
            {"cycle", r.cycle},
            {"cycle_start", r.cycle_start},
            {"cycle_length", r.cycle_length},
            {"rounds", r.rounds},
            {"rates", numbers(r.rates)},
            {"trajectory", traj}};
}

nlohmann::json to_json(const DeviationScan& scan) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : scan.points)
        pts.push_back({{"factor", p.factor},
                       {"prices", numbers(p.prices)},
                       {"value", to_json(p.value)},
                       {"delta", number(p.delta)},
                       {"delta_standard_error", number(p.delta_standard_error)},
                       {"significant_improvement", p.significant_improvement}});
    return {{"worker", scan.worker},
            {"baseline", to_json(scan.baseline)},
            {"improvement_found", scan.any_improvement()},
            {"points", pts}};
}

std::string price_column(std::size_t k) {
    if (k < 26) return std::string("p_") + static_cast<char>('A' + k) + "_star";
    return "p_" + std::to_string(k + 1) + "_star";
}

void write_sweep_csv(std::ostream& out, const std::string& parameter, std::size_t classes,
                     const std::vector<SweepRow>& rows) {
    out << parameter;
    for (std::size_t k = 0; k < classes; ++k) out << ',' << price_column(k);
    out << ",rate\n";
    for (const auto& r : rows) {
        out << exact_number(r.parameter);
        for (double p : r.prices) out << ',' << exact_number(p);
        out << ',' << exact_number(r.rate) << '\n';
    }
}

nlohmann::json to_json(const RunManifest& m) {
    return {{"command", m.command},       {"config_path", m.config_path}, {"seed", m.seed},
            {"outputs", m.outputs},       {"tool_version", m.tool_version},
            {"wall_seconds", m.wall_seconds}, {"argv", m.argv}};
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace odp
