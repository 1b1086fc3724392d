#include "mixlearn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixlearn/errors.hpp"
#include "mixlearn/lifter.hpp"
#include "mixlearn/metrics.hpp"
#include "mixlearn/select.hpp"
#include "mixlearn/serialize.hpp"
#include "mixlearn/theory.hpp"

namespace mixlearn {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Run settings: key=value pairs from a config file, overridden by CLI flags.
// Values of nested specs (targets, sweeps) are JSON documents.
struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.find(key) != kv.end(); }

    const std::string& require(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw_input("config key \"" + key + "\" is required here");
        return it->second;
    }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    std::int64_t integer(const std::string& key) const {
        const std::string& text = require(key);
        std::int64_t v = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw_input("config key \"" + key + "\" must be an integer, got \"" + text + "\"");
        return v;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    double real(const std::string& key) const {
        const std::string& text = require(key);
        double v = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw_input("config key \"" + key + "\" must be a number, got \"" + text + "\"");
        return v;
    }

    double real(const std::string& key, double fallback) const {
        return has(key) ? real(key) : fallback;
    }

    std::vector<std::int64_t> int_list(const std::string& key) const {
        const std::string& text = require(key);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw_input("config key \"" + key + "\" must be a JSON array of integers: " + e.what());
        }
        if (!j.is_array()) throw_input("config key \"" + key + "\" must be a JSON array");
        std::vector<std::int64_t> out;
        for (const auto& item : j) {
            if (!item.is_number_integer())
                throw_input("config key \"" + key + "\" must contain integers only");
            out.push_back(item.get<std::int64_t>());
        }
        return out;
    }

    Density density(const std::string& key) const {
        try {
            return deserialize(require(key));
        } catch (const Error& e) {
            throw Error(e.kind(), "config key \"" + key + "\": " + e.what());
        }
    }
};

void load_config_file(const std::string& path, Config& cfg) {
    const std::string text = read_text_file(path);
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line =
            text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw_input(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) throw_input(path + ":" + std::to_string(lineno) + ": empty key");
        cfg.kv[key] = trim(stripped.substr(eq + 1));
    }
}

// ---------------------------------------------------------------- targets --

struct TargetSetup {
    Density clean;
    Density effective;  // (1-eta) clean + eta contaminant; what gets sampled
    double eta = 0;
    std::optional<Density> contaminant;
};

TargetSetup resolve_target(const Config& cfg) {
    Density clean = cfg.density("target");
    const double eta = cfg.real("eta", 0.0);
    if (!(eta >= 0 && eta < 1)) throw_input("eta must lie in [0,1)");
    if (eta == 0) return {clean, clean, 0.0, std::nullopt};
    Density contaminant = cfg.density("contaminant");
    if (contaminant.dim() != clean.dim())
        throw_input("contaminant dimension must match the target");
    Density effective = Density::mixture({1.0 - eta, eta}, {clean, contaminant});
    return {std::move(clean), std::move(effective), eta, std::move(contaminant)};
}

LearnerSpec resolve_spec(const Config& cfg) {
    const std::string name = cfg.str("learner", "gaussian");
    LearnerSpec spec;
    if (name == "gaussian")
        spec = LearnerSpec::gaussian();
    else if (name == "axis_aligned")
        spec = LearnerSpec::axis_aligned();
    else
        throw_input("learner must be \"gaussian\" or \"axis_aligned\"");
    spec.alpha = cfg.real("alpha", spec.alpha);
    spec.c_dim = cfg.real("c_dim", spec.c_dim);
    spec.c_log = cfg.real("c_log", spec.c_log);
    spec.dim_power = cfg.real("dim_power", spec.dim_power);
    return spec;
}

Learner resolve_learner(const Config& cfg) {
    const std::string name = cfg.str("learner", "gaussian");
    double ridge = kAutoRidge;
    if (cfg.has("ridge") && cfg.str("ridge", "") != "auto") ridge = cfg.real("ridge");
    Learner learner;
    if (name == "gaussian")
        learner = make_gaussian_mle_learner(ridge);
    else if (name == "axis_aligned")
        learner = make_axis_aligned_mle_learner(ridge);
    else
        throw_input("learner must be \"gaussian\" or \"axis_aligned\"");
    learner.spec = resolve_spec(cfg);
    return learner;
}

BudgetPolicy resolve_budget(const Config& cfg) {
    const std::string mode = cfg.str("budget_mode", "exhaustive");
    if (mode == "exhaustive") return BudgetPolicy::exhaustive();
    if (mode != "capped") throw_input("budget_mode must be \"exhaustive\" or \"capped\"");
    BudgetPolicy b;
    b.mode = BudgetPolicy::Mode::capped;
    if (cfg.has("max_assignments")) {
        b.max_assignments = cfg.integer("max_assignments");
        if (*b.max_assignments < 1) throw_input("max_assignments must be >= 1");
    }
    if (cfg.has("max_candidates")) {
        b.max_candidates = cfg.integer("max_candidates");
        if (*b.max_candidates < 1) throw_input("max_candidates must be >= 1");
    }
    return b;
}

MixtureLearnOptions resolve_options(const Config& cfg) {
    MixtureLearnOptions o;
    if (cfg.has("s_override")) o.s_override = cfg.integer("s_override");
    if (cfg.has("cover_eps")) o.cover_eps = cfg.real("cover_eps");
    if (cfg.has("select_eps")) o.select_eps = cfg.real("select_eps");
    o.workers = static_cast<int>(cfg.integer("workers", 1));
    o.quadrature_cells = static_cast<std::size_t>(cfg.integer("quadrature_cells", 4096));
    o.mc_factor = static_cast<std::size_t>(cfg.integer("mc_factor", 20));
    return o;
}

// L1 between model and reference: quadrature in d=1, seeded Monte Carlo above.
double distance_l1(const Density& a, const Density& b, std::uint64_t seed) {
    if (a.dim() == 1) return l1_quadrature(a, b);
    return l1_monte_carlo(a, b, 100000, seed).value;
}

// Computable bracket for the in-class approximation floor of a contaminated
// target: eta times the contaminant's distance to the clean target. This is
// a documented proxy, not the true optimum.
double opt_lower_bound_for(const TargetSetup& t) {
    if (t.eta == 0) return 0.0;
    return t.eta * distance_l1(*t.contaminant, t.clean, /*seed=*/0);
}

fs::path prepare_out_dir(const Config& cfg) {
    const fs::path dir = cfg.str("out", ".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw_input("cannot create output directory \"" + dir.string() + "\"");
    return dir;
}

// Run report with the schema field set; runtime_ms is pinned to 0 in files so
// artifacts stay byte-identical across runs (real timing goes to stderr).
std::string report_json(const MixtureLearnReport& r) {
    return "{\"s\":" + std::to_string(r.s) + ",\"m\":" + std::to_string(r.m) +
           ",\"M\":" + std::to_string(r.M) + ",\"dedup\":" + std::to_string(r.dedup) +
           ",\"runtime_ms\":0,\"selected_index\":" + std::to_string(r.selected_index) + "}";
}

// --------------------------------------------------------------- commands --

int run_gen(const Config& cfg, bool json_mode, std::ostream& out) {
    const TargetSetup target = resolve_target(cfg);
    const std::int64_t n = cfg.integer("n");
    if (n < 0) throw_input("n must be >= 0");
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
    const fs::path dir = prepare_out_dir(cfg);

    const SampleSet sample = draw_sample(target.effective, static_cast<std::size_t>(n), seed);
    const fs::path data_path = dir / "sample.txt";
    const fs::path meta_path = dir / "sample.meta.json";
    write_text_file(data_path.string(), points_to_text(sample));
    write_text_file(meta_path.string(), "{\"seed\":" + std::to_string(seed) +
                                            ",\"target\":" + serialize(target.effective) + "}");
    if (json_mode)
        out << "{\"points\":" << n << ",\"data\":\"" << data_path.string() << "\",\"meta\":\""
            << meta_path.string() << "\"}\n";
    else
        out << "wrote " << data_path.string() << " (" << n << " points)\n";
    return 0;
}

int run_learn(const Config& cfg, bool json_mode, std::ostream& out, std::ostream& err) {
    const TargetSetup target = resolve_target(cfg);
    const auto k = static_cast<int>(cfg.integer("k"));
    const double eps = cfg.real("eps");
    const double delta = cfg.real("delta");
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
    const Learner learner = resolve_learner(cfg);
    const BudgetPolicy budget = resolve_budget(cfg);
    const MixtureLearnOptions options = resolve_options(cfg);
    const fs::path dir = prepare_out_dir(cfg);

    auto [model, report] = learn_mixture(target.effective, k, eps, delta, learner, budget, seed,
                                         options);
    const double l1 = distance_l1(model, target.effective, child_seed(seed, 3));
    const double opt_lb = opt_lower_bound_for(target);

    write_text_file((dir / "model.json").string(), serialize(model) + "\n");
    write_text_file((dir / "report.json").string(), report_json(report) + "\n");
    err << "learn: " << report.runtime_ms << " ms\n";

    if (json_mode)
        out << "{\"s\":" << report.s << ",\"m\":" << report.m << ",\"M\":" << report.M
            << ",\"dedup\":" << report.dedup << ",\"runtime_ms\":0,\"selected_index\":"
            << report.selected_index << ",\"l1_error\":" << format_double(l1)
            << ",\"opt_lower_bound\":" << format_double(opt_lb) << "}\n";
    else
        out << "s=" << report.s << " m=" << report.m << " M=" << report.M
            << " dedup=" << report.dedup << " selected_index=" << report.selected_index
            << " l1_error=" << format_double(l1) << " opt_lower_bound=" << format_double(opt_lb)
            << "\n";
    return 0;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

int run_exp(const Config& cfg, bool json_mode, std::ostream& out, std::ostream& err) {
    const std::string experiment = cfg.str("experiment", "mixture");
    if (experiment != "mle" && experiment != "mixture")
        throw_input("experiment must be \"mle\" or \"mixture\"");
    const std::vector<std::int64_t> sweep = cfg.int_list("sweep");
    if (sweep.empty()) throw_input("sweep must list at least one value");
    const std::vector<std::int64_t> seeds = cfg.int_list("seeds");
    if (seeds.size() < 2) throw_input("an experiment needs at least 2 seeds");

    const TargetSetup target = resolve_target(cfg);
    const int d = target.effective.dim();
    const Learner learner = resolve_learner(cfg);
    const double eps = cfg.real("eps", 0.0);
    const double opt_lb = opt_lower_bound_for(target);
    const fs::path dir = prepare_out_dir(cfg);

    const bool mixture_mode = experiment == "mixture";
    int k = 1;
    double delta = 0;
    BudgetPolicy budget;
    MixtureLearnOptions options;
    if (mixture_mode) {
        k = static_cast<int>(cfg.integer("k"));
        delta = cfg.real("delta");
        budget = resolve_budget(cfg);
        options = resolve_options(cfg);
    }

    std::string csv = "seed,k,d,eps,s,m,M,dedup,l1_error,opt_lower_bound,runtime_ms\n";
    std::string dat = std::string("# ") + (mixture_mode ? "s" : "m") + " median_l1_error\n";
    double wall_ms = 0;
    for (const std::int64_t value : sweep) {
        if (value < 0) throw_input("sweep values must be >= 0");
        std::vector<double> errors;
        for (const std::int64_t seed_signed : seeds) {
            const auto seed = static_cast<std::uint64_t>(seed_signed);
            std::int64_t s = 0, m = 0, M = 1, dedup = 0;
            Density model = target.clean;  // placeholder, overwritten below
            if (mixture_mode) {
                MixtureLearnOptions row_options = options;
                row_options.s_override = value;
                auto [learned, report] = learn_mixture(target.effective, k, eps, delta, learner,
                                                       budget, seed, row_options);
                model = std::move(learned);
                s = report.s;
                m = report.m;
                M = report.M;
                dedup = report.dedup;
                wall_ms += report.runtime_ms;
            } else {
                if (value < 1) throw_input("mle sweep values must be >= 1");
                const SampleSet sample = draw_sample(
                    target.effective, static_cast<std::size_t>(value), child_seed(seed, 0));
                model = learner.learn(sample);
                m = value;
            }
            const double l1 = distance_l1(model, target.effective, child_seed(seed, 3));
            errors.push_back(l1);
            csv += std::to_string(seed_signed) + ',' + std::to_string(mixture_mode ? k : 1) +
                   ',' + std::to_string(d) + ',' + format_double(eps) + ',' + std::to_string(s) +
                   ',' + std::to_string(m) + ',' + std::to_string(M) + ',' +
                   std::to_string(dedup) + ',' + format_double(l1) + ',' +
                   format_double(opt_lb) + ",0\n";
        }
        dat += std::to_string(value) + ' ' + format_double(median_of(errors)) + '\n';
    }

    const fs::path csv_path = dir / "results.csv";
    const fs::path dat_path = dir / "medians.dat";
    write_text_file(csv_path.string(), csv);
    write_text_file(dat_path.string(), dat);
    err << "exp: " << wall_ms << " ms inside the learner\n";
    if (json_mode)
        out << "{\"rows\":" << sweep.size() * seeds.size() << ",\"csv\":\"" << csv_path.string()
            << "\",\"medians\":\"" << dat_path.string() << "\"}\n";
    else
        out << "wrote " << csv_path.string() << " (" << sweep.size() * seeds.size()
            << " rows) and " << dat_path.string() << "\n";
    return 0;
}

int run_formulas(const Config& cfg, bool json_mode, std::ostream& out) {
    const auto k = static_cast<int>(cfg.integer("k"));
    const auto d = static_cast<int>(cfg.integer("d", 1));
    const double eps = cfg.real("eps");
    const double delta = cfg.real("delta");
    const LearnerSpec spec = resolve_spec(cfg);

    const SampleBudget budget = total_sample_budget(k, eps, delta, spec, d);
    const double threshold = negligible_threshold(k, delta, budget.s);
    std::optional<std::int64_t> selection_at;
    if (cfg.has("M")) selection_at = selection_sample_size(cfg.integer("M"), eps, delta);

    if (json_mode) {
        out << "{\"s\":" << budget.s << ",\"negligible_w\":" << format_double(threshold)
            << ",\"M_bound\":\"" << budget.m_bound
            << "\",\"ln_M_bound\":" << format_double(budget.ln_m_bound) << ",\"m\":" << budget.m
            << ",\"total\":" << budget.total;
        if (selection_at) out << ",\"selection_m_at_M\":" << *selection_at;
        out << "}\n";
    } else {
        out << "s            " << budget.s << "\n"
            << "negligible_w " << format_double(threshold) << "\n"
            << "M_bound      " << budget.m_bound << "\n"
            << "ln_M_bound   " << format_double(budget.ln_m_bound) << "\n"
            << "m            " << budget.m << "\n"
            << "total        " << budget.total << "\n";
        if (selection_at) out << "selection_m  " << *selection_at << "\n";
    }
    return 0;
}

int run_project_check(const Config& cfg, bool json_mode, std::ostream& out) {
    const std::string path = cfg.require("instance");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw_input(path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("g") || !j.contains("components") || !j.contains("weights"))
        throw_input(path + " must hold an object with \"g\", \"components\", \"weights\"");

    const Density g = deserialize(j["g"].dump());
    if (!j["components"].is_array() || j["components"].empty())
        throw_input(path + ": \"components\" must be a nonempty array");
    std::vector<Density> components;
    for (const auto& item : j["components"]) components.push_back(deserialize(item.dump()));
    if (!j["weights"].is_array()) throw_input(path + ": \"weights\" must be an array");
    std::vector<double> weights;
    for (const auto& item : j["weights"]) {
        if (!item.is_number()) throw_input(path + ": weights must be numbers");
        weights.push_back(item.get<double>());
    }

    const ProjectionWitness witness = project_to_mixture(g, components, weights);
    const bool pass = witness.identity_residual <= 1e-9 && witness.l1_residual <= 1e-6;
    if (json_mode)
        out << "{\"identity_residual\":" << format_double(witness.identity_residual)
            << ",\"l1_residual\":" << format_double(witness.l1_residual)
            << ",\"pass\":" << (pass ? "true" : "false") << "}\n";
    else
        out << "identity_residual " << format_double(witness.identity_residual) << "\n"
            << "l1_residual       " << format_double(witness.l1_residual) << "\n"
            << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

int run_select(const Config& cfg, bool json_mode, std::ostream& out) {
    const std::string candidates_path = cfg.require("candidates");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(candidates_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw_input(candidates_path + " is not valid JSON: " + e.what());
    }
    if (!j.is_array() || j.empty())
        throw_input(candidates_path + " must hold a nonempty JSON array of densities");
    std::vector<Density> candidates;
    for (const auto& item : j) candidates.push_back(deserialize(item.dump()));

    SampleSet sample = parse_points_text(read_text_file(cfg.require("sample")));
    const double eps = cfg.real("eps");

    const std::string strategy = cfg.str("oracle", "quadrature");
    MeasureOracle oracle;
    if (strategy == "exact")
        oracle = MeasureOracle::exact_gaussian_1d();
    else if (strategy == "quadrature")
        oracle = MeasureOracle::quadrature(shared_grid(
            candidates, static_cast<std::size_t>(cfg.integer("quadrature_cells", 4096))));
    else if (strategy == "monte_carlo")
        oracle = MeasureOracle::monte_carlo(static_cast<std::size_t>(cfg.integer("mc_points")),
                                            static_cast<std::uint64_t>(cfg.integer("mc_seed", 0)));
    else
        throw_input("oracle must be \"exact\", \"quadrature\" or \"monte_carlo\"");

    const TournamentResult result = select(candidates, sample, eps, oracle);
    if (cfg.str("emit_tournament", "") == "1") {
        const fs::path dir = prepare_out_dir(cfg);
        write_text_file((dir / "tournament.json").string(), tournament_to_json(result) + "\n");
    }
    if (json_mode)
        out << tournament_to_json(result) << "\n";
    else
        out << "winner " << result.winner << "\n";
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mixture density estimation toolkit"};
    app.name("mixlearn");
    app.require_subcommand(1);

    struct CommandState {
        std::string config_path;
        bool json = false;
        Config overrides;
    };
    std::map<std::string, CommandState> state;

    const auto add_kv = [&state](CLI::App* cmd, const std::string& flag, const std::string& key,
                                 const std::string& desc) {
        auto& slot = state[cmd->get_name()];
        cmd->add_option_function<std::string>(
            flag, [&slot, key](const std::string& v) { slot.overrides.kv[key] = v; }, desc);
    };
    const auto add_common = [&state, &add_kv](CLI::App* cmd) {
        auto& slot = state[cmd->get_name()];
        cmd->add_option("--config", slot.config_path, "key=value config file");
        cmd->add_flag("--json", slot.json, "machine-readable stdout");
        add_kv(cmd, "--seed", "seed", "base RNG seed");
        add_kv(cmd, "--out", "out", "output directory");
    };

    CLI::App* gen = app.add_subcommand("gen", "draw a sample from a target density");
    add_common(gen);
    add_kv(gen, "--target", "target", "target density (JSON)");
    add_kv(gen, "--n", "n", "number of points");
    add_kv(gen, "--eta", "eta", "contamination fraction");
    add_kv(gen, "--contaminant", "contaminant", "contaminant density (JSON)");

    CLI::App* learn = app.add_subcommand("learn", "run the end-to-end mixture learner");
    add_common(learn);
    for (const char* key : {"target", "contaminant"})
        add_kv(learn, std::string("--") + key, key, "density (JSON)");
    for (const char* key : {"k", "eps", "delta", "eta", "learner", "ridge", "budget_mode",
                            "max_assignments", "max_candidates", "s_override", "cover_eps",
                            "select_eps", "workers", "quadrature_cells", "mc_factor"}) {
        std::string flag = std::string("--") + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        add_kv(learn, flag, key, key);
    }

    CLI::App* exp = app.add_subcommand("exp", "sweep experiments producing CSV and plot data");
    add_common(exp);
    for (const char* key : {"target", "contaminant"})
        add_kv(exp, std::string("--") + key, key, "density (JSON)");
    for (const char* key : {"experiment", "sweep", "seeds", "k", "eps", "delta", "eta", "learner",
                            "ridge", "budget_mode", "max_assignments", "max_candidates",
                            "cover_eps", "select_eps", "workers", "quadrature_cells",
                            "mc_factor"}) {
        std::string flag = std::string("--") + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        add_kv(exp, flag, key, key);
    }

    CLI::App* formulas = app.add_subcommand("formulas", "print the sample-budget calculator");
    add_common(formulas);
    for (const char* key :
         {"k", "d", "eps", "delta", "learner", "alpha", "c_dim", "c_log", "dim_power", "M"}) {
        std::string flag = std::string("--") + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        add_kv(formulas, flag, key, key);
    }

    CLI::App* project = app.add_subcommand("project-check", "verify the projection identities");
    add_common(project);
    add_kv(project, "--instance", "instance", "instance file (JSON)");
    add_kv(project, "instance_pos", "instance", "instance file (JSON)");

    CLI::App* sel = app.add_subcommand("select", "tournament selection over a candidate file");
    add_common(sel);
    add_kv(sel, "--candidates", "candidates", "JSON array of candidate densities");
    add_kv(sel, "--sample", "sample", "evaluation points file");
    add_kv(sel, "--eps", "eps", "selection accuracy");
    add_kv(sel, "--oracle", "oracle", "exact | quadrature | monte_carlo");
    add_kv(sel, "--quadrature-cells", "quadrature_cells", "grid cells");
    add_kv(sel, "--mc-points", "mc_points", "Monte Carlo evaluation points");
    add_kv(sel, "--mc-seed", "mc_seed", "Monte Carlo seed");
    sel->add_flag_function(
        "--emit-tournament",
        [&state](std::int64_t) { state["select"].overrides.kv["emit_tournament"] = "1"; },
        "write tournament.json to the output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        CommandState& slot = state[active->get_name()];
        Config cfg;
        if (!slot.config_path.empty()) load_config_file(slot.config_path, cfg);
        for (const auto& [key, value] : slot.overrides.kv) cfg.kv[key] = value;

        const std::string name = active->get_name();
        if (name == "gen") return run_gen(cfg, slot.json, out);
        if (name == "learn") return run_learn(cfg, slot.json, out, err);
        if (name == "exp") return run_exp(cfg, slot.json, out, err);
        if (name == "formulas") return run_formulas(cfg, slot.json, out);
        if (name == "project-check") return run_project_check(cfg, slot.json, out);
        if (name == "select") return run_select(cfg, slot.json, out);
        err << "error: unknown subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace mixlearn
