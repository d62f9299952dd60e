#include "nib/report_io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include "nib/errors.hpp"

namespace nib {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

json to_json(const RunManifest& m) {
    return json{{"command", m.command}, {"input_path", m.input_path}, {"input_hash", m.input_hash},
                {"config", m.config},   {"seed", m.seed},             {"version", m.version},
                {"started", m.started}, {"finished", m.finished}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.input_path = j.value("input_path", "");
        m.input_hash = j.at("input_hash").get<std::string>();
        m.config = j.value("config", json::object());
        m.seed = j.value("seed", std::uint64_t{0});
        m.version = j.value("version", "");
        m.started = j.value("started", "");
        m.finished = j.value("finished", "");
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed run manifest: ") + e.what());
    }
    return m;
}

json classing_to_json(const NeighborhoodSystem& system, const EquivalenceClassing& classing) {
    const WeightedGraph& g = system.graph();
    json classes = json::array();
    for (std::size_t c = 0; c < system.intersections().size(); ++c) {
        const Neighborhood& nb = system.intersections()[c];
        json edges = json::array();
        for (EdgeId e : nb.edges) edges.push_back({g.edges()[e].u, g.edges()[e].v});
        classes.push_back({{"id", c}, {"nodes", nb.nodes}, {"edges", edges}});
    }
    json trivial = json::array();
    for (const auto& [k, id] : classing.trivial_classes) trivial.push_back({{"node", k}, {"id", id}});
    json hyperedges = json::array();
    for (std::size_t t = 0; t < classing.pivots.size(); ++t)
        hyperedges.push_back({{"pivot", classing.pivots[t]}, {"classes", classing.hyperedges[t]}});
    json witnesses = json::array();
    for (const ConditionWitness& w : classing.witnesses)
        witnesses.push_back({{"class", w.class_id}, {"k", w.k}, {"q", w.q}});
    json sizes = json::array();
    std::size_t max_primary = 0, max_inter = 0, max_diff = 0;
    for (const NeighborhoodSizes& s : neighborhood_size_report(system)) {
        sizes.push_back({{"i", s.i},
                         {"j", s.j},
                         {"primary_nodes", s.primary_nodes},
                         {"primary_edges", s.primary_edges},
                         {"intersection_nodes", s.intersection_nodes},
                         {"intersection_edges", s.intersection_edges},
                         {"difference_nodes", s.difference_nodes},
                         {"difference_edges", s.difference_edges}});
        max_primary = std::max(max_primary, s.primary_nodes);
        max_inter = std::max(max_inter, s.intersection_nodes);
        max_diff = std::max(max_diff, s.difference_nodes);
    }
    return json{{"r", system.loop_bound()},
                {"n", g.node_count()},
                {"edges", g.edge_count()},
                {"classes", classes},
                {"trivial_classes", trivial},
                {"pivots", classing.pivots},
                {"hyperedges", hyperedges},
                {"condition_holds", classing.condition_holds},
                {"witnesses", witnesses},
                {"acyclic", classing.acyclic},
                {"loop_bound_fulfilled", classing.loop_bound_fulfilled},
                {"verdict", classing.loop_bound_fulfilled ? "fulfilled" : "not fulfilled"},
                {"size_report",
                 {{"pairs", sizes},
                  {"max_primary_nodes", max_primary},
                  {"max_intersection_nodes", max_inter},
                  {"max_difference_nodes", max_diff}}}};
}

json to_json(const PercConfig& c) {
    json j{{"p", c.p},
           {"r", c.r},
           {"mode", to_string(c.mode)},
           {"z", c.z},
           {"s_max", c.s_max},
           {"tol", c.tol},
           {"max_iter", c.max_iter},
           {"damping", c.damping},
           {"enum_threshold", c.enum_threshold},
           {"mc_samples", c.mc_samples},
           {"seed", c.seed},
           {"schedule_rule", c.schedule_rule == ScheduleEdgeRule::residual ? "residual" : "literal"},
           {"random_init", c.random_init},
           {"threads", c.threads}};
    j["schedule_seed"] = c.schedule_seed ? json(*c.schedule_seed) : json(nullptr);
    return j;
}

json to_json(const PercolationReport& r) {
    json nodes = json::array();
    for (const NodeObservables& node : r.nodes) {
        json entry{{"id", node.id}, {"h1", node.h1}, {"mean_size", node.mean_size}, {"pi", node.pi}};
        if (r.s_max > 0) entry["tail"] = node.tail;
        if (node.hz) entry["hz"] = *node.hz;
        nodes.push_back(std::move(entry));
    }
    json j{{"p", r.p},
           {"r", r.r},
           {"mode", to_string(r.mode)},
           {"loop_bound_fulfilled", r.loop_bound_fulfilled},
           {"S", r.S},
           {"iterations", r.iterations},
           {"delta", r.delta},
           {"series_iterations", r.series_iterations},
           {"message_count", r.message_count},
           {"exact_averaging", r.exact_averaging},
           {"converged", r.converged},
           {"nodes", nodes}};
    if (r.z != 1.0) j["z"] = r.z;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

void write_percolation_csv(std::ostream& out, const PercolationReport& report) {
    out << "node,s,pi\n";
    for (const NodeObservables& node : report.nodes)
        for (std::size_t s = 0; s < node.pi.size(); ++s)
            out << node.id << ',' << (s + 1) << ',' << format_double(node.pi[s]) << '\n';
}

json to_json(const SpectralConfig& c) {
    json j{{"eta", c.eta},
           {"xmin", c.grid.min},
           {"xmax", c.grid.max},
           {"points", c.grid.count},
           {"r", c.r},
           {"mode", to_string(c.mode)},
           {"tol", c.tol},
           {"max_iter", c.max_iter},
           {"damping", c.damping},
           {"warm_start", c.warm_start},
           {"diagonal_rule", to_string(c.rule)},
           {"schedule_rule", c.schedule_rule == ScheduleEdgeRule::residual ? "residual" : "literal"},
           {"threads", c.threads}};
    j["schedule_seed"] = c.schedule_seed ? json(*c.schedule_seed) : json(nullptr);
    return j;
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
    out << "x,rho\n";
    for (const SpectrumRow& row : report.rows) out << format_double(row.x) << ',' << format_double(row.rho) << '\n';
}

json spectrum_metadata(const SpectrumReport& report) {
    json iterations = json::array();
    json raw = json::array();
    json errors = json::array();
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        const SpectrumRow& row = report.rows[k];
        iterations.push_back(row.iterations);
        raw.push_back(row.raw);
        if (!row.error.empty()) errors.push_back({{"index", k}, {"x", row.x}, {"error", row.error}});
    }
    return json{{"eta", report.eta},
                {"r", report.r},
                {"mode", to_string(report.mode)},
                {"loop_bound_fulfilled", report.loop_bound_fulfilled},
                {"diagonal_rule", to_string(report.rule)},
                {"warm_start", report.warm_start},
                {"message_count", report.message_count},
                {"mass_estimate", report.mass_estimate},
                {"all_converged", report.all_converged},
                {"per_x_iterations", iterations},
                {"raw_rho", raw},
                {"row_errors", errors}};
}

std::vector<std::pair<double, double>> read_spectrum_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,rho", 0) != 0) throw InputError("spectrum CSV must start with 'x,rho'");
    std::vector<std::pair<double, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw InputError("line " + std::to_string(line_no) + ": expected 'x,rho'");
        try {
            rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw InputError("line " + std::to_string(line_no) + ": not a number");
        }
    }
    return rows;
}

json to_json(const ExactPercolation& exact) {
    json nodes = json::array();
    for (std::size_t i = 0; i < exact.pi.size(); ++i) {
        nodes.push_back({{"id", i}, {"h1", exact.h1[i]}, {"mean_size", exact.mean_size[i]}, {"pi", exact.pi[i]}});
    }
    return json{{"oracle", "enumeration"},
                {"p", exact.p},
                {"giant_fraction", exact.giant_fraction},
                {"nodes", nodes}};
}

json to_json(const McPercolation& mc) {
    json nodes = json::array();
    for (std::size_t i = 0; i < mc.pi.size(); ++i) {
        json pi = json::array(), pi_err = json::array();
        for (const McEstimate& e : mc.pi[i]) {
            pi.push_back(e.mean);
            pi_err.push_back(e.std_error);
        }
        nodes.push_back({{"id", i},
                         {"mean_size", mc.mean_size[i].mean},
                         {"mean_size_stderr", mc.mean_size[i].std_error},
                         {"pi", pi},
                         {"pi_stderr", pi_err}});
    }
    return json{{"oracle", "monte_carlo"},
                {"p", mc.p},
                {"seed", mc.seed},
                {"trials", mc.trials},
                {"s_max", mc.s_max},
                {"giant_fraction", mc.giant_fraction.mean},
                {"giant_fraction_stderr", mc.giant_fraction.std_error},
                {"nodes", nodes}};
}

}  // namespace nib
