#include "edgewatch/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edgewatch/error.hpp"
#include "edgewatch/floquet.hpp"
#include "edgewatch/resonance.hpp"
#include "edgewatch/spectrum.hpp"
#include "edgewatch/verify.hpp"

namespace edgewatch::cli {

using ojson = nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

ojson to_json(const PowerLawFit& fit) {
    return ojson{{"x", fit.x_name},
                 {"y", fit.y_name},
                 {"slope", fit.slope},
                 {"intercept", fit.intercept},
                 {"r_squared", fit.r_squared},
                 {"n_points", fit.n_points}};
}

PowerLawFit fit_from_json(const nlohmann::json& j) {
    PowerLawFit fit;
    fit.x_name = j.at("x").get<std::string>();
    fit.y_name = j.at("y").get<std::string>();
    fit.slope = j.at("slope").get<double>();
    fit.intercept = j.at("intercept").get<double>();
    fit.r_squared = j.at("r_squared").get<double>();
    fit.n_points = j.at("n_points").get<int>();
    return fit;
}

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string potential;
    std::string potential_file;
    int L = 0;
    std::optional<double> edge;
    double eps = 0.2;
    double C0 = 50.0;
    double C1 = 10.0;
    std::string format = "csv";
    std::string output;
    std::uint64_t seed = 0;
    int n = 3;
    std::vector<int> Ls;
};

struct Artifact {
    std::vector<std::string> columns;
    ojson rows = ojson::array();
    ojson extra = ojson::object();
    int exit_code = kExitOk;
};

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string item = text.substr(start, comma - start);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        double x = 0.0;
        const char* first = item.data();
        const char* last = item.data() + item.size();
        if (!item.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, x);
        if (item.empty() || ec != std::errc() || ptr != last || !std::isfinite(x))
            throw UsageError("--potential: cannot parse '" + item + "' as a number");
        values.push_back(x);
        start = comma + 1;
    }
    return values;
}

PeriodicPotential load_potential(const Config& cfg) {
    if (!cfg.potential.empty() && !cfg.potential_file.empty())
        throw UsageError("--potential and --potential-file are mutually exclusive");
    if (!cfg.potential.empty()) return PeriodicPotential(parse_values(cfg.potential));
    if (cfg.potential_file.empty()) throw UsageError("--potential: a potential is required");
    std::ifstream in(cfg.potential_file);
    if (!in) throw UsageError("--potential-file: cannot open '" + cfg.potential_file + "'");
    nlohmann::json j;
    try {
        in >> j;
        const auto values = j.at("values").get<std::vector<double>>();
        if (j.contains("period") && j.at("period").get<int>() != static_cast<int>(values.size()))
            throw UsageError("--potential-file: period does not match the number of values");
        return PeriodicPotential(values);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("--potential-file: ") + e.what());
    }
}

void require_L(const Config& cfg, int minimum) {
    if (cfg.L < minimum) throw UsageError("--L: must be at least " + std::to_string(minimum));
}

void require_positive(double x, const char* flag) {
    if (!(x > 0.0)) throw UsageError(std::string(flag) + ": must be positive");
}

double require_edge(const Config& cfg) {
    if (!cfg.edge) throw UsageError("--edge: an edge energy is required");
    return *cfg.edge;
}

EdgeData select_edge(const PeriodicPotential& v, const BandStructure& bs, const Config& cfg, int j) {
    const double requested = require_edge(cfg);
    try {
        return classify_edge(v, bs, find_edge(bs, requested, 1e-6).energy, j);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotAnEdge)
            throw UsageError("--edge: no band edge within 1e-6 of " + format_double(requested));
        throw;
    }
}

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ";" : "") + items[i];
    return s;
}

SpectralData spectral_data(const PeriodicPotential& v, const BandStructure& bs, const Config& cfg, std::ostream& err) {
    if (cfg.L > 4000)
        err << "edgewatch: warning: L = " << cfg.L << " exceeds 4000; working-precision sums may lose accuracy\n";
    return compute_spectral_data(v, cfg.L, bs, {1e-13, cfg.seed});
}

Artifact cmd_bands(const Config& cfg) {
    const auto bs = band_structure(load_potential(cfg));
    Artifact a;
    a.columns = {"lo", "hi", "closed_gaps"};
    for (const auto& b : bs.bands())
        a.rows.push_back(ojson{{"lo", b.lo}, {"hi", b.hi}, {"closed_gaps", b.closed_gaps}});
    ojson points = ojson::array();
    for (const auto& b : bs.bands()) points.push_back(b.closed_gap_points);
    a.extra["closed_gap_points"] = points;
    return a;
}

Artifact cmd_edges(const Config& cfg) {
    const auto v = load_potential(cfg);
    const auto bs = band_structure(v);
    std::vector<int> js;
    if (cfg.L > 0)
        js.push_back(cfg.L % v.period());
    else
        for (int j = 0; j < v.period(); ++j) js.push_back(j);
    Artifact a;
    a.columns = {"e0",  "band", "side", "j",   "classification", "d_j1",           "a0_p_minus_1",
                 "a0_p", "rho", "a_j1", "b_j1", "zero_tolerance", "warnings"};
    for (const auto& ep : bs.edge_points()) {
        for (int j : js) {
            const auto e = classify_edge(v, bs, ep.energy, j);
            a.rows.push_back(ojson{{"e0", e.e0},
                                   {"band", e.band_index},
                                   {"side", std::string(to_string(e.side))},
                                   {"j", e.j},
                                   {"classification", std::string(to_string(e.classification))},
                                   {"d_j1", e.d_j1},
                                   {"a0_p_minus_1", e.a0_p_minus_1},
                                   {"a0_p", e.a0_p},
                                   {"rho", e.rho},
                                   {"a_j1", e.a_j1},
                                   {"b_j1", e.b_j1},
                                   {"zero_tolerance", e.zero_tolerance},
                                   {"warnings", join(e.warnings)}});
        }
    }
    return a;
}

Artifact cmd_spectrum(const Config& cfg, std::ostream& err) {
    require_L(cfg, 1);
    const auto v = load_potential(cfg);
    const auto bs = band_structure(v);
    const auto sd = spectral_data(v, bs, cfg, err);
    Artifact a;
    a.columns = {"k", "lambda", "a_end", "a_start", "band", "local_index"};
    for (std::size_t k = 0; k < sd.size(); ++k)
        a.rows.push_back(ojson{{"k", k},
                               {"lambda", sd.lambdas[k]},
                               {"a_end", sd.weights_end[k]},
                               {"a_start", sd.weights_start[k]},
                               {"band", sd.band_of[k]},
                               {"local_index", sd.local_index[k]}});
    a.extra["L"] = sd.L;
    a.extra["j"] = sd.j;
    a.extra["outside_spectrum"] = sd.outside_indices().size();
    return a;
}

SweepOptions sweep_options(const Config& cfg) {
    require_positive(cfg.eps, "--eps");
    require_positive(cfg.C0, "--C0");
    require_positive(cfg.C1, "--C1");
    SweepOptions o;
    o.eps = cfg.eps;
    o.C0 = cfg.C0;
    o.C1 = cfg.C1;
    o.fail_on_count_mismatch = false;
    return o;
}

ojson resonance_row(const Resonance& r) {
    return ojson{{"n", r.n},
                 {"lambda_n", r.lambda_n},
                 {"a_n", r.a_n},
                 {"alpha_re", r.alpha_n.real()},
                 {"alpha_im", r.alpha_n.imag()},
                 {"seed_re", r.seed.real()},
                 {"seed_im", r.seed.imag()},
                 {"z_re", r.z.real()},
                 {"z_im", r.z.imag()},
                 {"residual", r.residual},
                 {"box_count", r.box_count},
                 {"winding_verified", r.winding_verified},
                 {"in_shallow_box", r.in_shallow_box},
                 {"newton_iters", r.newton_iters}};
}

Artifact cmd_resonances(const Config& cfg, std::ostream& err) {
    require_L(cfg, 10);
    const auto opts = sweep_options(cfg);
    const auto v = load_potential(cfg);
    const auto bs = band_structure(v);
    const auto sd = spectral_data(v, bs, cfg, err);
    const auto edge = select_edge(v, bs, cfg, sd.j);
    const auto res = sweep_band_edge(sd, edge, opts);
    Artifact a;
    a.columns = {"n",    "lambda_n", "a_n",      "alpha_re",  "alpha_im",         "seed_re",        "seed_im",
                 "z_re", "z_im",     "residual", "box_count", "winding_verified", "in_shallow_box", "newton_iters"};
    for (const auto& r : res) {
        a.rows.push_back(resonance_row(r));
        if (!r.verified()) a.exit_code = kExitVerificationFailed;
    }
    a.extra["edge"] = edge.e0;
    a.extra["eps"] = opts.eps;
    a.extra["C0"] = opts.C0;
    a.extra["C1"] = opts.C1;
    return a;
}

Artifact cmd_free_region(const Config& cfg, std::ostream& err) {
    require_L(cfg, 10);
    require_positive(cfg.eps, "--eps");
    const auto v = load_potential(cfg);
    const auto bs = band_structure(v);
    const auto sd = spectral_data(v, bs, cfg, err);
    const auto edge = select_edge(v, bs, cfg, sd.j);
    const auto rep = free_region_report(sd, bs, edge, cfg.eps);
    Artifact a;
    a.columns = {"free", "count", "shifted_box_count", "x_lo", "x_hi", "depth"};
    a.rows.push_back(ojson{{"free", rep.free},
                           {"count", rep.count},
                           {"shifted_box_count", rep.shifted_box_count},
                           {"x_lo", rep.box.x_lo},
                           {"x_hi", rep.box.x_hi},
                           {"depth", rep.box.depth}});
    if (!rep.free || rep.shifted_box_count != 1) a.exit_code = kExitVerificationFailed;
    return a;
}

Artifact cmd_verify(const Config& cfg, std::ostream& err) {
    require_L(cfg, 10);
    if (cfg.L > 4000) err << "edgewatch: warning: L = " << cfg.L << " exceeds 4000\n";
    const auto results = run_property_suites(load_potential(cfg), cfg.L, cfg.seed);
    Artifact a;
    a.columns = {"suite", "pass", "detail"};
    for (const auto& r : results) {
        a.rows.push_back(ojson{{"suite", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        if (!r.pass) a.exit_code = kExitVerificationFailed;
    }
    return a;
}

ojson fit_row(const FitCheck& c) {
    ojson row = to_json(c.fit);
    row["expected"] = c.expected;
    row["tolerance"] = c.tolerance;
    row["pass"] = c.pass;
    row["note"] = c.note;
    return row;
}

Artifact cmd_scaling(const Config& cfg, std::ostream& err) {
    require_L(cfg, 10);
    const auto opts = sweep_options(cfg);
    const auto v = load_potential(cfg);
    const auto bs = band_structure(v);
    const auto sd = spectral_data(v, bs, cfg, err);
    const auto edge = select_edge(v, bs, cfg, sd.j);
    if (!(std::abs(edge.e0) < 2.0)) throw Error(ErrorKind::OutOfDomain, "edge is not inside (-2, 2)");
    std::vector<Resonance> res;
    if (edge.is_generic()) res = sweep_band_edge(sd, edge, opts);
    const auto rep = scaling_report(sd, res, edge, cfg.eps);
    Artifact a;
    a.columns = {"x", "y", "slope", "intercept", "r_squared", "n_points", "expected", "tolerance", "pass", "note"};
    for (const auto& c : rep.fits) a.rows.push_back(fit_row(c));
    a.extra["classification"] = std::string(to_string(rep.classification));
    a.extra["notes"] = rep.notes;
    if (!rep.pass()) a.exit_code = kExitVerificationFailed;
    return a;
}

Artifact cmd_l_scaling(const Config& cfg, std::ostream& err) {
    // l_scaling accepts three values, but the fit itself needs four points.
    if (cfg.Ls.size() < 4) throw UsageError("--Ls: at least four values of L are required");
    for (int L : cfg.Ls) {
        if (L < 10) throw UsageError("--Ls: every L must be at least 10");
        if (L > 4000) err << "edgewatch: warning: L = " << L << " exceeds 4000\n";
    }
    if (cfg.n < 0) throw UsageError("--n: must be non-negative");
    const auto opts = sweep_options(cfg);
    const auto v = load_potential(cfg);
    const double e0 = require_edge(cfg);
    const EigensystemOptions eig{1e-13, cfg.seed};

    struct Track {
        std::string name;
        double expected;
        std::function<int(int)> n_of_L;
    };
    const std::vector<Track> tracks{
        {"fixed-n", -3.0, [&](int) { return cfg.n; }},
        {"proportional-n", -1.0, [&](int L) { return static_cast<int>(std::floor(cfg.eps * L / cfg.C1)); }}};

    Artifact a;
    a.columns = {"track", "x", "y", "slope", "intercept", "r_squared", "n_points", "expected", "tolerance", "pass"};
    ojson points = ojson::object();
    for (const auto& t : tracks) {
        std::vector<LPoint> pts;
        try {
            pts = l_scaling_points(v, e0, cfg.Ls, t.n_of_L, opts, eig);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotAnEdge) throw UsageError("--edge: no band edge within 1e-6 of the value");
            throw;
        }
        const auto fit = l_scaling(pts, t.name == "fixed-n");
        FitCheck c;
        c.fit = fit;
        c.expected = t.expected;
        c.tolerance = 0.3;
        c.pass = std::abs(fit.slope - t.expected) <= c.tolerance;
        ojson row{{"track", t.name}};
        const ojson full = fit_row(c);
        for (auto& [k, val] : full.items())
            if (k != "note") row[k] = val;
        a.rows.push_back(row);
        if (!c.pass) a.exit_code = kExitVerificationFailed;
        ojson arr = ojson::array();
        for (const auto& p : pts) arr.push_back(ojson{{"L", p.L}, {"j", p.j}, {"n", p.n}, {"abs_im_z", p.abs_im_z}});
        points[t.name] = arr;
    }
    a.extra["points"] = points;
    return a;
}

std::string csv_field(const ojson& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return v.dump();
}

void render(const Artifact& a, const std::string& format, std::ostream& os) {
    if (format == "json") {
        ojson doc = a.extra;
        doc["columns"] = a.columns;
        doc["rows"] = a.rows;
        os << doc.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < a.columns.size(); ++i) os << (i ? "," : "") << a.columns[i];
    os << '\n';
    for (const auto& row : a.rows) {
        for (std::size_t i = 0; i < a.columns.size(); ++i) os << (i ? "," : "") << csv_field(row.at(a.columns[i]));
        os << '\n';
    }
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::NotAnEdge:
        case ErrorKind::OutOfDomain:
            return kExitUsage;
        case ErrorKind::UniquenessFailed:
            return kExitVerificationFailed;
        default:
            return kExitNumerical;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Resonances of truncated periodic Jacobi operators near band edges", "edgewatch"};
    app.require_subcommand(1);
    Config cfg;

    auto add_potential = [&](CLI::App* sub) {
        sub->add_option("--potential", cfg.potential, "Comma-separated period values, e.g. 0,3");
        sub->add_option("--potential-file", cfg.potential_file, "JSON file {\"period\": p, \"values\": [...]}");
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", cfg.output, "Write the artifact to this file instead of stdout");
    };
    auto add_L = [&](CLI::App* sub) { sub->add_option("--L", cfg.L, "Section length (sites 0..L)"); };
    auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "Seed for inverse-iteration start vectors")->capture_default_str();
    };
    auto add_edge = [&](CLI::App* sub) {
        sub->add_option("--edge", cfg.edge, "Band edge energy (matched within 1e-6)");
    };
    auto add_constants = [&](CLI::App* sub) {
        sub->add_option("--eps", cfg.eps, "Edge window eps")->capture_default_str();
        sub->add_option("--C0", cfg.C0, "Depth constant of the shallow box")->capture_default_str();
        sub->add_option("--C1", cfg.C1, "Sweep reach: n <= eps L / C1")->capture_default_str();
    };

    auto* bands = app.add_subcommand("bands", "Band table of the periodic operator");
    add_potential(bands);
    auto* edges = app.add_subcommand("edges", "Band edges with genericity classification");
    add_potential(edges);
    add_L(edges);
    auto* spectrum = app.add_subcommand("spectrum", "Dirichlet eigenvalues and boundary weights");
    add_potential(spectrum);
    add_L(spectrum);
    add_seed(spectrum);
    auto* resonances = app.add_subcommand("resonances", "Resonances near a band edge");
    add_potential(resonances);
    add_L(resonances);
    add_seed(resonances);
    add_edge(resonances);
    add_constants(resonances);
    auto* free_region = app.add_subcommand("free-region", "Resonance-free rectangle outside a band edge");
    add_potential(free_region);
    add_L(free_region);
    add_seed(free_region);
    add_edge(free_region);
    free_region->add_option("--eps", cfg.eps, "Width of the region")->capture_default_str();
    auto* verify = app.add_subcommand("verify", "Run the property suites");
    add_potential(verify);
    verify->add_option("--L", cfg.L, "Section length")->default_str("200");
    add_seed(verify);
    auto* scaling = app.add_subcommand("scaling", "Power-law fits near a band edge");
    add_potential(scaling);
    add_L(scaling);
    add_seed(scaling);
    add_edge(scaling);
    add_constants(scaling);
    auto* l_scaling_cmd = app.add_subcommand("l-scaling", "Resonance width against L");
    add_potential(l_scaling_cmd);
    add_seed(l_scaling_cmd);
    add_edge(l_scaling_cmd);
    add_constants(l_scaling_cmd);
    l_scaling_cmd->add_option("--Ls", cfg.Ls, "Comma-separated section lengths")->delimiter(',');
    l_scaling_cmd->add_option("--n", cfg.n, "Fixed resonance index")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "edgewatch: error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (verify->parsed() && cfg.L == 0) cfg.L = 200;

    try {
        Artifact a;
        if (bands->parsed()) a = cmd_bands(cfg);
        else if (edges->parsed()) a = cmd_edges(cfg);
        else if (spectrum->parsed()) a = cmd_spectrum(cfg, err);
        else if (resonances->parsed()) a = cmd_resonances(cfg, err);
        else if (free_region->parsed()) a = cmd_free_region(cfg, err);
        else if (verify->parsed()) a = cmd_verify(cfg, err);
        else if (scaling->parsed()) a = cmd_scaling(cfg, err);
        else a = cmd_l_scaling(cfg, err);

        if (cfg.output.empty()) {
            render(a, cfg.format, out);
        } else {
            std::ofstream file(cfg.output, std::ios::binary);
            if (!file) throw UsageError("--output: cannot open '" + cfg.output + "' for writing");
            render(a, cfg.format, file);
        }
        return a.exit_code;
    } catch (const UsageError& e) {
        err << "edgewatch: error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "edgewatch: error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "edgewatch: error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace edgewatch::cli
