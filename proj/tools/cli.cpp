#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "nib/errors.hpp"
#include "nib/graph.hpp"
#include "nib/neighborhoods.hpp"
#include "nib/oracle.hpp"
#include "nib/percolation.hpp"
#include "nib/report_io.hpp"
#include "nib/spectra.hpp"

namespace nib::cli {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// A graph plus what the manifest needs to identify it.
struct LoadedInput {
    std::string path;
    std::string hash;
    WeightedGraph graph;
};

LoadedInput load_graph_input(const std::string& graph_path, const std::string& matrix_path) {
    if (graph_path.empty() == matrix_path.empty()) throw InputError("give exactly one of --graph or --matrix");
    const std::string& path = graph_path.empty() ? matrix_path : graph_path;
    std::string text = read_file(path);
    WeightedGraph g = graph_path.empty() ? load_matrix(text) : load_edge_list(text);
    return {path, hex64(fnv1a64(text)), std::move(g)};
}

/// Destination for the primary output: a file when a path is given, else `fallback`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw InputError("cannot write '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void write_json(const json& doc, const std::string& path, std::ostream& fallback) {
    Sink sink(path, fallback);
    sink.get() << doc.dump(2) << '\n';
}

/// Side-channel metadata for CSV outputs: --meta, else "<out>.json", else `err`.
void write_metadata(const json& doc, const std::string& meta_path, const std::string& out_path, std::ostream& err) {
    std::string path = meta_path;
    if (path.empty() && !out_path.empty()) path = out_path + ".json";
    write_json(doc, path, err);
}

RunManifest start_manifest(std::string command, const LoadedInput& input, json config, std::uint64_t seed) {
    RunManifest m;
    m.command = std::move(command);
    m.input_path = input.path;
    m.input_hash = input.hash;
    m.config = std::move(config);
    m.seed = seed;
    m.started = utc_timestamp();
    return m;
}

json finish(RunManifest m) {
    m.finished = utc_timestamp();
    return to_json(m);
}

// ---- option groups -------------------------------------------------------

struct InputOptions {
    std::string graph;
    std::string matrix;
    std::string out;
};

void add_graph_input(CLI::App* app, InputOptions& o, bool allow_matrix) {
    app->add_option("--graph", o.graph, "edge-list file ('u v [w]' per line)");
    if (allow_matrix) app->add_option("--matrix", o.matrix, "symmetric coordinate matrix ('n nnz' header, 'i j value')");
    app->add_option("--out", o.out, "output path (default stdout)");
}

struct PercOptions {
    PercConfig config;
    std::string mode = "auto";
    std::string schedule_rule = "residual";
    std::optional<std::uint64_t> schedule_seed;
    std::string format = "json";
    std::string meta;
};

void add_perc_options(CLI::App* app, PercOptions& o) {
    app->add_option("--p", o.config.p, "edge occupation probability")->required();
    app->add_option("--r", o.config.r, "loop bound")->capture_default_str();
    app->add_option("--mode", o.mode, "auto | bounded | unbounded")->capture_default_str();
    app->add_option("--smax", o.config.s_max, "largest resolved cluster size (0 skips the series pass)")
        ->capture_default_str();
    app->add_option("--z", o.config.z, "extra real evaluation point of H_i(z)")->capture_default_str();
    app->add_option("--tol", o.config.tol)->capture_default_str();
    app->add_option("--max-iter", o.config.max_iter)->capture_default_str();
    app->add_option("--damping", o.config.damping)->capture_default_str();
    app->add_option("--enum-threshold", o.config.enum_threshold, "local problems above this edge count are sampled")
        ->capture_default_str();
    app->add_option("--mc-samples", o.config.mc_samples)->capture_default_str();
    app->add_option("--seed", o.config.seed)->capture_default_str();
    app->add_option("--schedule-rule", o.schedule_rule, "residual | literal")->capture_default_str();
    app->add_option("--schedule-seed", o.schedule_seed, "shuffle the accumulation schedules");
    app->add_flag("--random-init", o.config.random_init, "start scalar messages uniformly in [0,1]");
    app->add_option("--threads", o.config.threads, "worker cap (0 = all cores)")->capture_default_str();
}

PercConfig resolve(PercOptions& o) {
    PercConfig c = o.config;
    c.mode = parse_mode(o.mode);
    if (o.schedule_rule == "residual") {
        c.schedule_rule = ScheduleEdgeRule::residual;
    } else if (o.schedule_rule == "literal") {
        c.schedule_rule = ScheduleEdgeRule::literal;
    } else {
        throw InputError("unknown schedule rule '" + o.schedule_rule + "'");
    }
    c.schedule_seed = o.schedule_seed;
    c.validate();
    return c;
}

struct SpecOptions {
    SpectralConfig config;
    std::string mode = "auto";
    std::string rule = "resolvent";
    bool literal_d = false;
    std::string schedule_rule = "residual";
    std::optional<std::uint64_t> schedule_seed;
    std::string meta;
};

void add_grid_options(CLI::App* app, SpectralConfig& c) {
    app->add_option("--eta", c.eta, "resolution (imaginary part of z)")->capture_default_str();
    app->add_option("--xmin", c.grid.min)->capture_default_str();
    app->add_option("--xmax", c.grid.max)->capture_default_str();
    app->add_option("--points", c.grid.count)->capture_default_str();
}

void add_spec_options(CLI::App* app, SpecOptions& o) {
    add_grid_options(app, o.config);
    app->add_option("--r", o.config.r, "loop bound")->capture_default_str();
    app->add_option("--mode", o.mode, "auto | bounded | unbounded")->capture_default_str();
    app->add_flag("--literal-d", o.literal_d, "diagonal entries as the plain product of (z - H)");
    app->add_option("--diag-rule", o.rule, "resolvent | literal_product | inverse_factor")->capture_default_str();
    app->add_option("--tol", o.config.tol)->capture_default_str();
    app->add_option("--max-iter", o.config.max_iter)->capture_default_str();
    app->add_option("--damping", o.config.damping)->capture_default_str();
    app->add_flag("--warm-start", o.config.warm_start, "reuse converged messages at the next grid point");
    app->add_option("--schedule-rule", o.schedule_rule, "residual | literal")->capture_default_str();
    app->add_option("--schedule-seed", o.schedule_seed);
    app->add_option("--threads", o.config.threads, "worker cap (0 = all cores)")->capture_default_str();
}

SpectralConfig resolve(SpecOptions& o) {
    SpectralConfig c = o.config;
    c.mode = parse_mode(o.mode);
    c.rule = o.literal_d ? DiagonalRule::literal_product : parse_diagonal_rule(o.rule);
    if (o.schedule_rule == "residual") {
        c.schedule_rule = ScheduleEdgeRule::residual;
    } else if (o.schedule_rule == "literal") {
        c.schedule_rule = ScheduleEdgeRule::literal;
    } else {
        throw InputError("unknown schedule rule '" + o.schedule_rule + "'");
    }
    c.schedule_seed = o.schedule_seed;
    c.validate();
    return c;
}

// ---- comparison ----------------------------------------------------------

struct Deviation {
    std::string name;
    double max_abs = 0.0;
    std::size_t values = 0;
    std::size_t violations = 0;
    std::size_t flagged = 0;
};

/// Diffs per-node observables of two percolation documents. Entries with a
/// stderr on either side are judged against sigma * stderr + abs_tol, the
/// others against abs_tol. Between sigma and sigma + 1 standard errors a
/// value is flagged instead of failed.
json diff_percolation(const json& a, const json& b, double abs_tol, double sigma) {
    const json& na = a.at("nodes");
    const json& nb = b.at("nodes");
    if (na.size() != nb.size()) throw InputError("reports describe different node counts");
    std::map<std::string, Deviation> devs;
    auto check = [&](const std::string& name, double x, double y, double se) {
        Deviation& d = devs[name];
        d.name = name;
        double diff = std::abs(x - y);
        d.max_abs = std::max(d.max_abs, diff);
        ++d.values;
        if (se > 0.0) {
            if (diff > (sigma + 1.0) * se + abs_tol) {
                ++d.violations;
            } else if (diff > sigma * se + abs_tol) {
                ++d.flagged;
            }
        } else if (diff > abs_tol) {
            ++d.violations;
        }
    };
    auto stderr_at = [](const json& node, const char* key, std::size_t k) {
        if (!node.contains(key)) return 0.0;
        const json& v = node.at(key);
        if (v.is_array()) return k < v.size() ? v[k].get<double>() : 0.0;
        return v.get<double>();
    };
    for (std::size_t i = 0; i < na.size(); ++i) {
        const json& x = na[i];
        const json& y = nb[i];
        if (x.contains("h1") && y.contains("h1")) check("h1", x["h1"], y["h1"], 0.0);
        double se = std::hypot(stderr_at(x, "mean_size_stderr", 0), stderr_at(y, "mean_size_stderr", 0));
        check("mean_size", x.at("mean_size"), y.at("mean_size"), se);
        const json& px = x.at("pi");
        const json& py = y.at("pi");
        for (std::size_t s = 0; s < std::min(px.size(), py.size()); ++s) {
            double pse = std::hypot(stderr_at(x, "pi_stderr", s), stderr_at(y, "pi_stderr", s));
            check("pi", px[s], py[s], pse);
        }
    }
    json list = json::array();
    double worst = 0.0;
    bool pass = true;
    for (const auto& [name, d] : devs) {
        list.push_back({{"observable", name},
                        {"max_abs_dev", d.max_abs},
                        {"values", d.values},
                        {"violations", d.violations},
                        {"flagged", d.flagged}});
        worst = std::max(worst, d.max_abs);
        if (d.violations > 0) pass = false;
    }
    return json{{"observables", list}, {"max_abs_dev", worst}, {"abs_tol", abs_tol}, {"sigma", sigma}, {"pass", pass}};
}

json diff_spectrum(const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b,
                   double tol) {
    if (a.size() != b.size()) throw InputError("spectra have different grid sizes");
    double worst = 0.0, worst_x = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::abs(a[k].first - b[k].first) > 1e-12 * std::max(1.0, std::abs(a[k].first)))
            throw InputError("spectra use different grids");
        double d = std::abs(a[k].second - b[k].second);
        if (d > worst) {
            worst = d;
            worst_x = a[k].first;
        }
    }
    return json{{"points", a.size()}, {"max_abs_dev", worst}, {"at_x", worst_x}, {"tol", tol}, {"pass", worst <= tol}};
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void require_same_input(const json& ma, const json& mb) {
    RunManifest a = manifest_from_json(ma);
    RunManifest b = manifest_from_json(mb);
    if (a.input_hash != b.input_hash)
        throw InputError("input hashes differ (" + a.input_hash + " vs " + b.input_hash + "); refusing to compare");
}

std::vector<std::pair<double, double>> oracle_curve(const WeightedGraph& g, const SpectralConfig& c,
                                                    std::vector<double>* eigs_out = nullptr) {
    const std::vector<double> dense = to_dense(g);
    std::vector<double> eigs = dense_eigenvalues(dense, g.node_count());
    std::vector<std::pair<double, double>> rows(c.grid.count);
    for (std::size_t k = 0; k < c.grid.count; ++k) {
        double x = c.grid.at(k);
        rows[k] = {x, exact_density(eigs, x, c.eta)};
    }
    if (eigs_out) *eigs_out = std::move(eigs);
    return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<std::pair<double, double>>& rows) {
    out << "x,rho\n";
    for (const auto& [x, rho] : rows) out << format_double(x) << ',' << format_double(rho) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neighborhood message passing for bond percolation and sparse spectral densities", "nib"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // neigh
    CLI::App* neigh = app.add_subcommand("neigh", "classify neighborhoods and report the loop-bound verdict");
    InputOptions neigh_in;
    int neigh_r = 0;
    add_graph_input(neigh, neigh_in, true);
    neigh->add_option("--r", neigh_r, "loop bound")->capture_default_str();

    // percolation
    CLI::App* perc = app.add_subcommand("percolation", "cluster statistics by message passing");
    InputOptions perc_in;
    PercOptions perc_opt;
    add_graph_input(perc, perc_in, false);
    add_perc_options(perc, perc_opt);
    perc->add_option("--format", perc_opt.format, "json | csv")->capture_default_str();
    perc->add_option("--meta", perc_opt.meta, "metadata path for CSV output");

    // spectrum
    CLI::App* spec = app.add_subcommand("spectrum", "spectral density by message passing");
    InputOptions spec_in;
    SpecOptions spec_opt;
    add_graph_input(spec, spec_in, true);
    add_spec_options(spec, spec_opt);
    spec->add_option("--meta", spec_opt.meta, "metadata path (default <out>.json, or stderr)");

    // oracle
    CLI::App* oracle = app.add_subcommand("oracle", "brute-force reference results");
    oracle->require_subcommand(1);
    CLI::App* oracle_perc = oracle->add_subcommand("percolation", "exhaustive enumeration or Monte Carlo");
    InputOptions oracle_perc_in;
    double oracle_p = 0.5;
    std::string oracle_method = "auto";
    std::size_t oracle_trials = 100000;
    std::uint64_t oracle_seed = 0;
    std::size_t oracle_smax = 0;
    unsigned oracle_threads = 1;
    add_graph_input(oracle_perc, oracle_perc_in, false);
    oracle_perc->add_option("--p", oracle_p)->required();
    oracle_perc->add_option("--method", oracle_method, "auto | exact | mc")->capture_default_str();
    oracle_perc->add_option("--trials", oracle_trials)->capture_default_str();
    oracle_perc->add_option("--seed", oracle_seed)->capture_default_str();
    oracle_perc->add_option("--smax", oracle_smax, "sizes tracked by Monte Carlo (0 = n)")->capture_default_str();
    oracle_perc->add_option("--threads", oracle_threads)->capture_default_str();

    CLI::App* oracle_spec = oracle->add_subcommand("spectrum", "density from dense eigenvalues");
    InputOptions oracle_spec_in;
    SpectralConfig oracle_spec_cfg;
    std::string oracle_spec_meta;
    add_graph_input(oracle_spec, oracle_spec_in, true);
    add_grid_options(oracle_spec, oracle_spec_cfg);
    oracle_spec->add_option("--meta", oracle_spec_meta);

    // compare
    CLI::App* compare = app.add_subcommand("compare", "diff method output against an oracle");
    compare->require_subcommand(1);
    CLI::App* cmp_perc = compare->add_subcommand("percolation", "compare two reports, or run both routes on --graph");
    InputOptions cmp_perc_in;
    PercOptions cmp_perc_opt;
    std::string cmp_a, cmp_b;
    double cmp_abs_tol = 1e-9;
    double cmp_sigma = 3.0;
    std::string cmp_oracle = "auto";
    std::size_t cmp_trials = 100000;
    std::uint64_t cmp_seed = 0;
    add_graph_input(cmp_perc, cmp_perc_in, false);
    cmp_perc->add_option("--a", cmp_a, "first report (JSON)");
    cmp_perc->add_option("--b", cmp_b, "second report (JSON)");
    cmp_perc->add_option("--p", cmp_perc_opt.config.p);
    cmp_perc->add_option("--r", cmp_perc_opt.config.r)->capture_default_str();
    cmp_perc->add_option("--mode", cmp_perc_opt.mode)->capture_default_str();
    cmp_perc->add_option("--smax", cmp_perc_opt.config.s_max, "0 = node count")->capture_default_str();
    cmp_perc->add_option("--oracle", cmp_oracle, "auto | exact | mc")->capture_default_str();
    cmp_perc->add_option("--trials", cmp_trials)->capture_default_str();
    cmp_perc->add_option("--seed", cmp_seed)->capture_default_str();
    cmp_perc->add_option("--abs-tol", cmp_abs_tol)->capture_default_str();
    cmp_perc->add_option("--sigma", cmp_sigma, "stderr multiple for Monte Carlo entries")->capture_default_str();
    cmp_perc->add_option("--threads", cmp_perc_opt.config.threads)->capture_default_str();

    CLI::App* cmp_spec = compare->add_subcommand("spectrum", "compare two spectrum CSVs, or run both routes");
    InputOptions cmp_spec_in;
    SpecOptions cmp_spec_opt;
    std::string cmp_spec_a, cmp_spec_b;
    double cmp_spec_tol = 1e-8;
    add_graph_input(cmp_spec, cmp_spec_in, true);
    add_spec_options(cmp_spec, cmp_spec_opt);
    cmp_spec->add_option("--a", cmp_spec_a, "first CSV (its metadata read from <a>.json)");
    cmp_spec->add_option("--b", cmp_spec_b, "second CSV (its metadata read from <b>.json)");
    cmp_spec->add_option("--max-dev", cmp_spec_tol, "pointwise tolerance on |rho_a - rho_b|")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*neigh) {
            LoadedInput input = load_graph_input(neigh_in.graph, neigh_in.matrix);
            RunManifest m = start_manifest("neigh", input, json{{"r", neigh_r}}, 0);
            if (neigh_r < 0) throw InputError("loop bound r must be nonnegative");
            NeighborhoodSystem system(input.graph, neigh_r);
            EquivalenceClassing classing = classify(system);
            json doc = classing_to_json(system, classing);
            doc["manifest"] = finish(std::move(m));
            write_json(doc, neigh_in.out, out);
            return kOk;
        }

        if (*perc) {
            LoadedInput input = load_graph_input(perc_in.graph, "");
            PercConfig config = resolve(perc_opt);
            RunManifest m = start_manifest("percolation", input, to_json(config), config.seed);
            PercolationReport report = run_percolation(input.graph, config);
            json manifest = finish(std::move(m));
            if (perc_opt.format == "csv") {
                Sink sink(perc_in.out, out);
                write_percolation_csv(sink.get(), report);
                json meta = to_json(report);
                meta.erase("nodes");
                meta["manifest"] = manifest;
                write_metadata(meta, perc_opt.meta, perc_in.out, err);
            } else if (perc_opt.format == "json") {
                json doc = to_json(report);
                doc["manifest"] = manifest;
                write_json(doc, perc_in.out, out);
            } else {
                throw InputError("unknown format '" + perc_opt.format + "'");
            }
            if (!report.converged) {
                err << "nib: " << report.error << '\n';
                return kConvergenceFailure;
            }
            return kOk;
        }

        if (*spec) {
            LoadedInput input = load_graph_input(spec_in.graph, spec_in.matrix);
            SpectralConfig config = resolve(spec_opt);
            RunManifest m = start_manifest("spectrum", input, to_json(config), 0);
            SpectrumReport report = sweep(input.graph, config);
            {
                Sink sink(spec_in.out, out);
                write_spectrum_csv(sink.get(), report);
            }
            json meta = spectrum_metadata(report);
            meta["manifest"] = finish(std::move(m));
            write_metadata(meta, spec_opt.meta, spec_in.out, err);
            return report.all_converged ? kOk : kConvergenceFailure;
        }

        if (*oracle_perc) {
            LoadedInput input = load_graph_input(oracle_perc_in.graph, "");
            bool exact = oracle_method == "exact" ||
                         (oracle_method == "auto" && input.graph.edge_count() <= kMaxEnumerationEdges);
            if (oracle_method != "exact" && oracle_method != "mc" && oracle_method != "auto")
                throw InputError("unknown oracle method '" + oracle_method + "'");
            json config{{"p", oracle_p},
                        {"method", exact ? "exact" : "mc"},
                        {"trials", oracle_trials},
                        {"s_max", oracle_smax},
                        {"threads", oracle_threads}};
            RunManifest m = start_manifest("oracle percolation", input, config, oracle_seed);
            json doc = exact ? to_json(exact_percolation_enumeration(input.graph, oracle_p, oracle_threads))
                             : to_json(mc_percolation(input.graph, oracle_p, oracle_trials, oracle_seed, oracle_smax,
                                                      oracle_threads));
            doc["manifest"] = finish(std::move(m));
            write_json(doc, oracle_perc_in.out, out);
            return kOk;
        }

        if (*oracle_spec) {
            LoadedInput input = load_graph_input(oracle_spec_in.graph, oracle_spec_in.matrix);
            oracle_spec_cfg.validate();
            RunManifest m = start_manifest(
                "oracle spectrum", input,
                json{{"eta", oracle_spec_cfg.eta},
                     {"xmin", oracle_spec_cfg.grid.min},
                     {"xmax", oracle_spec_cfg.grid.max},
                     {"points", oracle_spec_cfg.grid.count}},
                0);
            std::vector<double> eigs;
            auto rows = oracle_curve(input.graph, oracle_spec_cfg, &eigs);
            {
                Sink sink(oracle_spec_in.out, out);
                write_curve_csv(sink.get(), rows);
            }
            std::vector<double> xs, ys;
            for (const auto& [x, y] : rows) {
                xs.push_back(x);
                ys.push_back(y);
            }
            json meta{{"oracle", "dense_eigenvalues"},
                      {"eta", oracle_spec_cfg.eta},
                      {"eigenvalues", eigs},
                      {"mass_estimate", trapezoid(xs, ys)}};
            meta["manifest"] = finish(std::move(m));
            write_metadata(meta, oracle_spec_meta, oracle_spec_in.out, err);
            return kOk;
        }

        if (*cmp_perc) {
            json a_doc, b_doc;
            json manifest;
            if (!cmp_a.empty() || !cmp_b.empty()) {
                if (cmp_a.empty() || cmp_b.empty()) throw InputError("give both --a and --b");
                a_doc = read_json_file(cmp_a);
                b_doc = read_json_file(cmp_b);
                if (!a_doc.contains("manifest") || !b_doc.contains("manifest"))
                    throw InputError("both reports need a run manifest");
                require_same_input(a_doc["manifest"], b_doc["manifest"]);
            } else {
                LoadedInput input = load_graph_input(cmp_perc_in.graph, "");
                if (cmp_perc_opt.config.s_max == 0) cmp_perc_opt.config.s_max = input.graph.node_count();
                PercConfig config = resolve(cmp_perc_opt);
                bool exact = cmp_oracle == "exact" ||
                             (cmp_oracle == "auto" && input.graph.edge_count() <= kMaxEnumerationEdges);
                json cfg = to_json(config);
                cfg["oracle"] = exact ? "exact" : "mc";
                cfg["trials"] = cmp_trials;
                RunManifest m = start_manifest("compare percolation", input, cfg, cmp_seed);
                PercolationReport report = run_percolation(input.graph, config);
                a_doc = to_json(report);
                b_doc = exact ? to_json(exact_percolation_enumeration(input.graph, config.p, config.threads))
                              : to_json(mc_percolation(input.graph, config.p, cmp_trials, cmp_seed, config.s_max,
                                                       config.threads));
                manifest = finish(std::move(m));
            }
            json doc = diff_percolation(a_doc, b_doc, cmp_abs_tol, cmp_sigma);
            if (!manifest.is_null()) doc["manifest"] = manifest;
            write_json(doc, cmp_perc_in.out, out);
            return kOk;
        }

        if (*cmp_spec) {
            std::vector<std::pair<double, double>> a_rows, b_rows;
            json manifest;
            if (!cmp_spec_a.empty() || !cmp_spec_b.empty()) {
                if (cmp_spec_a.empty() || cmp_spec_b.empty()) throw InputError("give both --a and --b");
                json ma = read_json_file(cmp_spec_a + ".json");
                json mb = read_json_file(cmp_spec_b + ".json");
                if (!ma.contains("manifest") || !mb.contains("manifest"))
                    throw InputError("both spectra need metadata with a run manifest");
                require_same_input(ma["manifest"], mb["manifest"]);
                std::istringstream sa(read_file(cmp_spec_a)), sb(read_file(cmp_spec_b));
                a_rows = read_spectrum_csv(sa);
                b_rows = read_spectrum_csv(sb);
            } else {
                LoadedInput input = load_graph_input(cmp_spec_in.graph, cmp_spec_in.matrix);
                SpectralConfig config = resolve(cmp_spec_opt);
                RunManifest m = start_manifest("compare spectrum", input, to_json(config), 0);
                SpectrumReport report = sweep(input.graph, config);
                for (const SpectrumRow& row : report.rows) a_rows.emplace_back(row.x, row.rho);
                b_rows = oracle_curve(input.graph, config);
                manifest = finish(std::move(m));
            }
            json doc = diff_spectrum(a_rows, b_rows, cmp_spec_tol);
            if (!manifest.is_null()) doc["manifest"] = manifest;
            write_json(doc, cmp_spec_in.out, out);
            return kOk;
        }
    } catch (const LoopBoundError& e) {
        err << "nib: " << e.what() << '\n';
        return kLoopBoundNotFulfilled;
    } catch (const ConvergenceError& e) {
        err << "nib: " << e.what() << '\n';
        return kConvergenceFailure;
    } catch (const NumericalError& e) {
        err << "nib: " << e.what() << '\n';
        return kConvergenceFailure;
    } catch (const InputError& e) {
        err << "nib: " << e.what() << '\n';
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        err << "nib: malformed report: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace nib::cli
