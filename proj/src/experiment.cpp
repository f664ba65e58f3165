#include "smid/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "smid/errors.hpp"
#include "smid/io.hpp"

namespace smid::experiment {

namespace pt = boost::property_tree;

void ExperimentConfig::validate() const {
    if (static_cast<int>(trajectories.size()) != order.n_params()) {
        throw ConfigError("config '" + name + "': need one trajectory per parameter");
    }
    if (samples <= std::max(order.n_a(), order.n_b())) throw ConfigError("config: samples must exceed max(n_a, n_b)");
    if (noise.has_value() == snr.has_value()) {
        throw ConfigError("config: give exactly one of explicit noise bounds or target SNRs");
    }
    if (noise && (!(noise->delta_eta >= 0.0) || !(noise->delta_zeta >= 0.0))) {
        throw ConfigError("config: noise bounds must be >= 0");
    }
    if (!(input_lo <= input_hi)) throw ConfigError("config: input range needs lo <= hi");
    if (variation && static_cast<int>(variation->size()) != order.n_params()) {
        throw ConfigError("config: variation needs one entry per parameter");
    }
    if (!(initial_radius >= 0.0)) throw ConfigError("config: initial_radius must be >= 0");
    for (const auto& k : known) order.param_index(k);
    if (oracle_grid < 3 || oracle_grid % 2 == 0) throw ConfigError("config: oracle grid must be odd and >= 3");
    if (verify_steps < 1) throw ConfigError("config: verify steps must be >= 1");
}

std::vector<std::string> preset_names() {
    return {"example1", "example1-low", "example2", "example2-low", "zero-noise"};
}

namespace {

ExperimentConfig example1(double snr_in, double snr_out) {
    ExperimentConfig c;
    c.order = ModelOrder(1, 1);
    // w(t) = -a1(t) w(t-1) + b1(t) x(t-1); b0 is structurally zero.
    c.trajectories = {ParameterTrajectory::sinusoid(0.2, 0.4, 500.0), ParameterTrajectory::constant(0.0),
                      ParameterTrajectory::sinusoid(-2.0, 0.5, 750.0)};
    c.samples = 1500;
    c.snr = SnrTargets{snr_in, snr_out};
    c.known = {"b0"};
    return c;
}

ExperimentConfig example2(double snr_in, double snr_out) {
    ExperimentConfig c;
    // G = b(t) q^-2 / (1 + a1(t) q^-1 + a2 q^-2); the lag-2 numerator
    // coefficient is b2 here, b0 and b1 are structurally zero.
    c.order = ModelOrder(2, 2);
    c.trajectories = {ParameterTrajectory::sinusoid(1.0, 0.1, 1000.0), ParameterTrajectory::constant(0.25),
                      ParameterTrajectory::constant(0.0), ParameterTrajectory::constant(0.0),
                      ParameterTrajectory::sinusoid(0.8, 0.3, 2000.0)};
    c.samples = 2000;
    c.snr = SnrTargets{snr_in, snr_out};
    c.known = {"b0", "b1"};
    // Keeps every prior box on one side of zero (a2 = 0.25).
    c.initial_radius = 0.2;
    // Three active noise dimensions: 21^3 grid points per certified step.
    c.oracle_grid = 21;
    return c;
}

std::vector<std::string> tokens(const std::string& s, const char* seps = " ,\t") {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (std::string_view(seps).find(ch) != std::string_view::npos) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double to_number(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: '" + s + "'");
    }
}

long to_integer(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not an integer: '" + s + "'");
    }
}

ParameterTrajectory parse_trajectory(const std::string& text, const std::string& where) {
    const auto t = tokens(text);
    if (t.size() == 2 && t[0] == "constant") return ParameterTrajectory::constant(to_number(t[1], where));
    if (t.size() == 4 && t[0] == "sinusoid") {
        return ParameterTrajectory::sinusoid(to_number(t[1], where), to_number(t[2], where), to_number(t[3], where));
    }
    throw ConfigError(where + ": expected 'constant <v>' or 'sinusoid <offset> <amplitude> <period>'");
}

std::string trajectory_text(const ParameterTrajectory& tr) {
    if (tr.kind() == ParameterTrajectory::Kind::Constant) return "constant " + io::format_double(tr.offset());
    return "sinusoid " + io::format_double(tr.offset()) + " " + io::format_double(tr.amplitude()) + " " +
           io::format_double(tr.period());
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"experiment", {"version", "name", "n_a", "n_b", "samples", "seed"}},
        {"input", {"lo", "hi"}},
        {"parameters", {}},
        {"noise", {"snr_input_db", "snr_output_db", "delta_eta", "delta_zeta"}},
        {"variation", {}},
        {"identifier", {"method", "signs", "initial_radius", "known", "on_empty"}},
        {"oracle", {"grid", "steps"}},
    };
    return keys;
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    if (name == "example1") c = example1(47.0, 46.0);
    else if (name == "example1-low") c = example1(27.0, 26.0);
    else if (name == "example2") c = example2(52.0, 51.0);
    else if (name == "example2-low") c = example2(32.0, 31.0);
    else if (name == "zero-noise") {
        c = example1(0.0, 0.0);
        c.snr.reset();
        c.noise = NoiseBounds{0.0, 0.0};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.name = name;
    return c;
}

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        const auto it = allowed_keys().find(section);
        if (it == allowed_keys().end()) throw ConfigError(source + ": unknown section [" + section + "]");
        if (it->second.empty()) continue;
        for (const auto& [key, _] : body) {
            if (!it->second.contains(key)) throw ConfigError(source + ": unknown key '" + key + "' in [" + section + "]");
        }
    }

    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(path)) return *v;
        return std::nullopt;
    };
    auto require = [&](const std::string& path) {
        auto v = get(path);
        if (!v) throw ConfigError(source + ": missing '" + path + "'");
        return *v;
    };

    const long version = to_integer(require("experiment.version"), source);
    if (version != kConfigVersion) {
        throw ConfigError(source + ": unsupported config version " + std::to_string(version));
    }

    ExperimentConfig c;
    c.name = get("experiment.name").value_or("custom");
    c.order = ModelOrder(static_cast<int>(to_integer(require("experiment.n_a"), source)),
                         static_cast<int>(to_integer(require("experiment.n_b"), source)));
    c.samples = to_integer(require("experiment.samples"), source);
    if (auto s = get("experiment.seed")) c.seed = static_cast<std::uint64_t>(to_integer(*s, source));
    if (auto v = get("input.lo")) c.input_lo = to_number(*v, source);
    if (auto v = get("input.hi")) c.input_hi = to_number(*v, source);

    const auto& params = tree.get_child_optional("parameters");
    if (!params) throw ConfigError(source + ": missing [parameters]");
    c.trajectories.clear();
    for (int k = 0; k < c.order.n_params(); ++k) {
        const auto name = c.order.param_name(k);
        c.trajectories.push_back(parse_trajectory(require("parameters." + name), source + " [parameters] " + name));
    }
    if (static_cast<int>(params->size()) != c.order.n_params()) {
        throw ConfigError(source + ": [parameters] must list exactly the model's parameters");
    }

    const auto snr_in = get("noise.snr_input_db"), snr_out = get("noise.snr_output_db");
    const auto d_eta = get("noise.delta_eta"), d_zeta = get("noise.delta_zeta");
    if ((snr_in || snr_out) && (d_eta || d_zeta)) {
        throw ConfigError(source + ": [noise] mixes SNR targets and explicit bounds");
    }
    if (snr_in || snr_out) {
        if (!snr_in || !snr_out) throw ConfigError(source + ": [noise] needs both snr_input_db and snr_output_db");
        c.snr = SnrTargets{to_number(*snr_in, source), to_number(*snr_out, source)};
    } else if (d_eta || d_zeta) {
        if (!d_eta || !d_zeta) throw ConfigError(source + ": [noise] needs both delta_eta and delta_zeta");
        c.noise = NoiseBounds{to_number(*d_eta, source), to_number(*d_zeta, source)};
    }

    if (const auto& var = tree.get_child_optional("variation")) {
        std::vector<double> v;
        for (int k = 0; k < c.order.n_params(); ++k) {
            v.push_back(to_number(require("variation." + c.order.param_name(k)), source));
        }
        if (static_cast<int>(var->size()) != c.order.n_params()) {
            throw ConfigError(source + ": [variation] must list exactly the model's parameters");
        }
        c.variation = std::move(v);
    }

    if (auto m = get("identifier.method")) c.method = parse_method(*m);
    if (auto s = get("identifier.signs")) c.signs = *s;
    if (auto r = get("identifier.initial_radius")) c.initial_radius = to_number(*r, source);
    if (auto kn = get("identifier.known")) c.known = tokens(*kn);
    if (auto e = get("identifier.on_empty")) {
        if (*e == "fail") c.on_empty = EmptyFpsPolicy::FailFast;
        else if (*e == "hold") c.on_empty = EmptyFpsPolicy::SkipAndHold;
        else throw ConfigError(source + ": on_empty must be 'fail' or 'hold'");
    }
    if (auto g = get("oracle.grid")) c.oracle_grid = static_cast<int>(to_integer(*g, source));
    if (auto s = get("oracle.steps")) c.verify_steps = static_cast<int>(to_integer(*s, source));

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in, path);
}

void write_config(std::ostream& os, const ExperimentConfig& c) {
    os << "[experiment]\n"
       << "version = " << kConfigVersion << '\n'
       << "name = " << c.name << '\n'
       << "n_a = " << c.order.n_a() << '\n'
       << "n_b = " << c.order.n_b() << '\n'
       << "samples = " << c.samples << '\n'
       << "seed = " << c.seed << "\n\n"
       << "[input]\n"
       << "lo = " << io::format_double(c.input_lo) << '\n'
       << "hi = " << io::format_double(c.input_hi) << "\n\n"
       << "[parameters]\n";
    for (int k = 0; k < c.order.n_params(); ++k) {
        os << c.order.param_name(k) << " = " << trajectory_text(c.trajectories[static_cast<std::size_t>(k)]) << '\n';
    }
    os << "\n[noise]\n";
    if (c.snr) {
        os << "snr_input_db = " << io::format_double(c.snr->input_db) << '\n'
           << "snr_output_db = " << io::format_double(c.snr->output_db) << '\n';
    } else if (c.noise) {
        os << "delta_eta = " << io::format_double(c.noise->delta_eta) << '\n'
           << "delta_zeta = " << io::format_double(c.noise->delta_zeta) << '\n';
    }
    if (c.variation) {
        os << "\n[variation]\n";
        for (int k = 0; k < c.order.n_params(); ++k) {
            os << c.order.param_name(k) << " = " << io::format_double((*c.variation)[static_cast<std::size_t>(k)]) << '\n';
        }
    }
    os << "\n[identifier]\n"
       << "method = " << to_string(c.method) << '\n'
       << "signs = " << c.signs << '\n'
       << "initial_radius = " << io::format_double(c.initial_radius) << '\n';
    if (!c.known.empty()) {
        os << "known =";
        for (const auto& k : c.known) os << ' ' << k;
        os << '\n';
    }
    os << "on_empty = " << (c.on_empty == EmptyFpsPolicy::FailFast ? "fail" : "hold") << "\n\n"
       << "[oracle]\n"
       << "grid = " << c.oracle_grid << '\n'
       << "steps = " << c.verify_steps << '\n';
}

Dataset make_dataset(const ExperimentConfig& cfg) {
    cfg.validate();
    const InputSpec input{cfg.input_lo, cfg.input_hi, cfg.seed};
    NoiseSpec noise;
    noise.seed = cfg.seed;
    if (cfg.noise) {
        noise.delta_eta = cfg.noise->delta_eta;
        noise.delta_zeta = cfg.noise->delta_zeta;
    } else {
        const auto clean = simulate(cfg.trajectories, cfg.order, NoiseSpec{}, input, cfg.samples);
        noise.delta_eta = delta_for_snr(clean.w, cfg.snr->output_db);
        noise.delta_zeta = delta_for_snr(clean.x, cfg.snr->input_db);
    }
    return simulate(cfg.trajectories, cfg.order, noise, input, cfg.samples);
}

NoiseBounds noise_bounds(const ExperimentConfig& cfg, const Dataset& d) {
    if (cfg.noise) return *cfg.noise;
    if (!cfg.snr) throw ConfigError("config has neither noise bounds nor SNR targets");
    return {delta_for_snr(d.w, cfg.snr->output_db), delta_for_snr(d.x, cfg.snr->input_db)};
}

SignSource signs_from_truth(const Dataset& d) {
    auto theta = std::make_shared<const std::vector<std::vector<double>>>(d.theta);
    return [theta](long t) {
        if (t < 1 || t > static_cast<long>(theta->size())) throw ConfigError("sign source: t out of range");
        std::vector<int> s;
        for (double v : (*theta)[static_cast<std::size_t>(t - 1)]) s.push_back(v >= 0.0 ? 1 : -1);
        return s;
    };
}

IdentifierConfig identifier_config(const ExperimentConfig& cfg, const Dataset& d, Method method) {
    cfg.validate();
    if (!(d.order == cfg.order)) throw ConfigError("dataset order does not match the config");
    IdentifierConfig ic(cfg.order);
    ic.noise = noise_bounds(cfg, d);
    ic.variation = cfg.variation ? *cfg.variation : variation_bounds_of(cfg.trajectories);
    ic.initial.t = 0;
    for (int k = 0; k < cfg.order.n_params(); ++k) {
        const double v0 = cfg.trajectories[static_cast<std::size_t>(k)].at(0);
        const bool is_known = std::find(cfg.known.begin(), cfg.known.end(), cfg.order.param_name(k)) != cfg.known.end();
        const double r = is_known ? 0.0 : cfg.initial_radius;
        ic.initial.intervals.push_back({v0 - r, v0 + r});
    }
    ic.method = method;
    ic.on_empty = cfg.on_empty;
    if (method == Method::RsmS) {
        if (cfg.signs == "from-truth") {
            ic.signs = signs_from_truth(d);
        } else {
            std::vector<int> fixed(static_cast<std::size_t>(cfg.order.n_params()), 0);
            for (const auto& tok : tokens(cfg.signs)) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw ConfigError("signs: expected name=+1|-1, got '" + tok + "'");
                const int k = cfg.order.param_index(tok.substr(0, eq));
                const auto val = tok.substr(eq + 1);
                if (val == "+1" || val == "1") fixed[static_cast<std::size_t>(k)] = 1;
                else if (val == "-1") fixed[static_cast<std::size_t>(k)] = -1;
                else throw ConfigError("signs: value for " + tok.substr(0, eq) + " must be +1 or -1");
            }
            for (int s : fixed) {
                if (s == 0) throw ConfigError("signs: every parameter needs a declared sign");
            }
            ic.signs = [fixed](long) { return fixed; };
        }
    }
    ic.validate();
    return ic;
}

nlohmann::json dataset_sidecar(const ExperimentConfig& cfg, const Dataset& d) {
    const auto nb = noise_bounds(cfg, d);
    nlohmann::json j;
    j["config"] = cfg.name;
    j["samples"] = d.size();
    j["n_a"] = d.order.n_a();
    j["n_b"] = d.order.n_b();
    j["seed"] = cfg.seed;
    j["delta_eta"] = nb.delta_eta;
    j["delta_zeta"] = nb.delta_zeta;
    j["snr_input_db"] = io::snr_json(snr_input(d));
    j["snr_output_db"] = io::snr_json(snr_output(d));
    if (cfg.snr) {
        j["target_snr_input_db"] = cfg.snr->input_db;
        j["target_snr_output_db"] = cfg.snr->output_db;
    }
    return j;
}

CompareReport compare(const ExperimentConfig& cfg, const Dataset& d, Method first, Method second) {
    CompareReport r;
    r.first = first;
    r.second = second;
    const auto a = run(d, identifier_config(cfg, d, first));
    const auto b = run(d, identifier_config(cfg, d, second));
    r.first_summary = summarize(a, d, first);
    r.second_summary = summarize(b, d, second);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].measured) continue;
        for (std::size_t k = 0; k < a[i].pui.intervals.size(); ++k) {
            CompareRow row;
            row.t = a[i].t;
            row.k = static_cast<int>(k);
            row.first = a[i].pui.intervals[k];
            row.second = b[i].pui.intervals[k];
            row.discrepancy = std::max(std::abs(row.first.lower - row.second.lower),
                                       std::abs(row.first.upper - row.second.upper));
            if (row.discrepancy > r.max_discrepancy) {
                r.max_discrepancy = row.discrepancy;
                r.worst_t = row.t;
                r.worst_k = row.k;
            }
            r.rows.push_back(row);
        }
    }
    return r;
}

void write_compare_csv(std::ostream& os, const CompareReport& r) {
    const std::string a = to_string(r.first), b = to_string(r.second);
    os << "t,k,lower_" << a << ",upper_" << a << ",lower_" << b << ",upper_" << b << ",discrepancy\n";
    for (const auto& row : r.rows) {
        os << row.t << ',' << (row.k + 1) << ',' << io::format_double(row.first.lower) << ','
           << io::format_double(row.first.upper) << ',' << io::format_double(row.second.lower) << ','
           << io::format_double(row.second.upper) << ',' << io::format_double(row.discrepancy) << '\n';
    }
}

nlohmann::json compare_json(const CompareReport& r) {
    return {{"first", to_string(r.first)},
            {"second", to_string(r.second)},
            {"max_discrepancy", r.max_discrepancy},
            {"worst_t", r.worst_t},
            {"worst_k", r.worst_k + 1},
            {"first_summary", io::summary_json(r.first_summary)},
            {"second_summary", io::summary_json(r.second_summary)}};
}

std::vector<long> sample_steps(long first, long last, int count) {
    std::vector<long> out;
    if (last < first || count < 1) return out;
    const long span = last - first;
    if (span + 1 <= count) {
        for (long t = first; t <= last; ++t) out.push_back(t);
        return out;
    }
    if (count == 1) return {first};
    for (int i = 0; i < count; ++i) {
        out.push_back(first + static_cast<long>(std::llround(static_cast<double>(i) * span / (count - 1))));
    }
    return out;
}

VerifyReport verify(const ExperimentConfig& cfg, const Dataset& d, int grid, int steps) {
    const auto ic = identifier_config(cfg, d, Method::RsmM);
    const auto records = run(d, ic);
    const auto ts = sample_steps(cfg.order.first_identified_step(), d.size(), steps);

    auto instance_at = [&](long t) {
        const PuiState prev = t >= 2 ? records[static_cast<std::size_t>(t - 2)].pui : ic.initial;
        return oracle::Instance{RegressorWindow::at(d.u, d.y, cfg.order, t), time_update(prev, ic.variation),
                                ic.noise, t};
    };

    oracle::Config oc;
    oc.grid_points = grid;
    double worst_budget = 0.0;
    for (long t : ts) worst_budget = std::max(worst_budget, oracle::required_subproblems(instance_at(t), grid));
    if (worst_budget > static_cast<double>(oc.max_subproblems)) throw OracleBudgetExceeded(worst_budget, oc.max_subproblems);

    VerifyReport rep;
    rep.grid = grid;
    for (long t : ts) {
        const auto inst = instance_at(t);
        const auto results = oracle::pui_bruteforce_all(inst, oc);
        const double tol = oracle::gap_tolerance(inst, grid);
        const auto& relaxed = records[static_cast<std::size_t>(t - 1)].pui;
        for (std::size_t k = 0; k < results.size(); ++k) {
            VerifyRow row;
            row.t = t;
            row.k = static_cast<int>(k);
            row.oracle = results[k].interval;
            row.relaxed = relaxed.intervals[k];
            row.sound = row.relaxed.contains(row.oracle, kSoundnessSlack);
            row.gap = std::max(0.0, std::max(row.oracle.lower - row.relaxed.lower, row.relaxed.upper - row.oracle.upper));
            row.tolerance = tol;
            row.witnesses_ok = oracle::witness_satisfies(inst, results[k].lower_witness) &&
                               oracle::witness_satisfies(inst, results[k].upper_witness);
            row.pass = row.sound && row.witnesses_ok && row.gap <= tol;
            rep.all_sound = rep.all_sound && row.sound;
            rep.all_pass = rep.all_pass && row.pass;
            rep.max_gap = std::max(rep.max_gap, row.gap);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

void write_verify_csv(std::ostream& os, const VerifyReport& r) {
    os << "t,k,oracle_lower,oracle_upper,relaxed_lower,relaxed_upper,gap,tolerance,sound,witnesses_ok,pass\n";
    for (const auto& row : r.rows) {
        os << row.t << ',' << (row.k + 1) << ',' << io::format_double(row.oracle.lower) << ','
           << io::format_double(row.oracle.upper) << ',' << io::format_double(row.relaxed.lower) << ','
           << io::format_double(row.relaxed.upper) << ',' << io::format_double(row.gap) << ','
           << io::format_double(row.tolerance) << ',' << row.sound << ',' << row.witnesses_ok << ',' << row.pass
           << '\n';
    }
}

nlohmann::json verify_json(const VerifyReport& r) {
    long failed = 0;
    for (const auto& row : r.rows) failed += row.pass ? 0 : 1;
    return {{"grid", r.grid},
            {"checks", r.rows.size()},
            {"failed", failed},
            {"all_sound", r.all_sound},
            {"all_pass", r.all_pass},
            {"max_gap", r.max_gap}};
}

}  // namespace smid::experiment
