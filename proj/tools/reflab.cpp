// reflab: command-line front end for the theory, simulator, tasks, corpus and
// metrics. Every command that writes --out also writes <out>.manifest.json,
// from which `reflab replay --config <manifest>` reruns it.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or input error,
// 3 outputs written but statistics flagged degenerate.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reflab/reflab.hpp"

namespace {

using namespace reflab;

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, failure = 1, usage = 2, degenerate = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- config files and manifests -------------------------------------------------

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

/// Resolves --config FILE (a flat flag object or a manifest) into extra
/// arguments for flags not given on the command line. `replay` takes its
/// command from the manifest.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    const bool replay = !args.empty() && args[0] == "replay";
    if (path.empty()) {
        if (replay) throw UsageError("replay needs --config <manifest>");
        return args;
    }
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    if (replay) {
        if (!doc.contains("command")) throw UsageError("manifest has no command");
        args[0] = doc["command"].get<std::string>();
    }
    const json& cfg = doc.contains("config") ? doc["config"] : doc;
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    std::vector<std::string> extra;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (has_flag(args, flag)) continue;
        const auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_array()) {
            for (const auto& v : value) {
                extra.push_back(flag);
                extra.push_back(text(v));
            }
        } else if (!value.is_null()) {
            extra.push_back(flag);
            extra.push_back(text(value));
        }
    }
    args.insert(args.begin() + (args.empty() ? 0 : 1), extra.begin(), extra.end());
    return args;
}

/// Option values of a subcommand (given or default), keyed by long name.
json collect_config(const CLI::App& sub) {
    json cfg = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name.empty()) continue;
        std::vector<std::string> values = opt->count() ? opt->results() : std::vector<std::string>{};
        if (values.empty()) {
            const std::string def = opt->get_default_str();
            if (def.empty()) continue;
            if (opt->get_expected_max() > 1 && def.size() >= 2 && def.front() == '[' && def.back() == ']') {
                std::stringstream ss(def.substr(1, def.size() - 2));
                for (std::string item; std::getline(ss, item, ',');) values.push_back(item);
            } else {
                values.push_back(def);
            }
        }
        if (opt->get_expected_max() > 1)
            cfg[name] = values;
        else
            cfg[name] = values.back();
    }
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const CLI::App& sub, const std::string& out, std::uint64_t seed) {
    json m;
    m["tool"] = "reflab";
    m["version"] = kVersion;
    m["command"] = sub.get_name();
    m["config"] = collect_config(sub);
    m["seed"] = seed;
    write_text(out + ".manifest.json", m.dump(2) + "\n");
}

/// CSV goes to --out (plus manifest) or to stdout.
void emit(const CLI::App& sub, const std::string& out, std::uint64_t seed, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    write_text(out, text);
    write_manifest(sub, out, seed);
}

// --- option parsing helpers -----------------------------------------------------

/// Accepts plain integers and inclusive ranges "a:b".
std::vector<std::size_t> index_list(const std::vector<std::string>& items, const char* what) {
    std::vector<std::size_t> out;
    for (const auto& s : items) {
        try {
            const auto colon = s.find(':');
            if (colon == std::string::npos) {
                out.push_back(std::stoul(s));
                continue;
            }
            const auto lo = std::stoul(s.substr(0, colon));
            const auto hi = std::stoul(s.substr(colon + 1));
            if (hi < lo) throw UsageError(std::string("empty range for ") + what + ": " + s);
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError(std::string("bad value for ") + what + ": " + s);
        }
    }
    if (out.empty()) throw UsageError(std::string("no values for ") + what);
    return out;
}

void require_format(const std::string& format, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (format == a) return;
    throw UsageError("unsupported --format " + format);
}

struct ParamFlags {
    double mu = 0.8, e_minus = 0.3, e_plus = 0.2, f = 0.8;

    void add(CLI::App* app) {
        app->add_option("--mu", mu, "planning correctness");
        app->add_option("--e-minus", e_minus, "false-negative rate");
        app->add_option("--e-plus", e_plus, "false-positive rate");
        app->add_option("--f", f, "rejection rate on negative states");
    }
    theory::SimplifiedParams get() const {
        theory::SimplifiedParams p{mu, e_minus, e_plus, f};
        p.validate();
        return p;
    }
};

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    std::size_t threads = 0;

    void add(CLI::App* app, const char* format_default) {
        format = format_default;
        app->add_option("--seed", seed, "global seed");
        app->add_option("--out", out, "output path (stdout when omitted, where allowed)");
        app->add_option("--format", format, "csv or jsonl");
        app->add_option("--threads", threads, "worker threads (0: REFLECT_LAB_THREADS or all cores)");
    }
};

// --- commands -------------------------------------------------------------------

int cmd_theory_curve(const CLI::App& sub, const Common& c, const ParamFlags& pf, const std::vector<std::string>& n_arg,
                     const std::vector<std::string>& m_arg) {
    require_format(c.format, {"csv"});
    const auto p = pf.get();
    const auto ns = index_list(n_arg, "--n");
    const auto ms = index_list(m_arg, "--m");
    const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
    std::vector<std::vector<double>> rtbs;
    for (std::size_t m : ms) {
        const auto t = theory::rtbs_table(p, m, n_max);
        std::vector<double> rho(n_max + 1, 1.0);
        for (std::size_t n = 1; n <= n_max; ++n) rho[n] = rho[n - 1] * t.sigma[n];
        rtbs.push_back(std::move(rho));
    }
    std::ostringstream os;
    os << "n,rho,rho_rmtp";
    for (std::size_t m : ms) os << ",rho_rtbs_m" << m;
    os << '\n';
    for (std::size_t n = 1; n <= n_max; ++n) {
        os << n << ',' << format_double(theory::rho_nonreflective(p.mu, n)) << ','
           << format_double(theory::rho_rmtp(p, n));
        for (const auto& r : rtbs) os << ',' << format_double(r[n]);
        os << '\n';
    }
    emit(sub, c.out, c.seed, os.str());
    return ok;
}

std::vector<sim::Mode> parse_modes(const std::vector<std::string>& items) {
    std::vector<sim::Mode> modes;
    for (const auto& s : items) modes.push_back(sim::parse_mode(s));
    return modes;
}

int cmd_simulate(const CLI::App& sub, const Common& c, const ParamFlags& pf, const std::vector<std::string>& mode_arg,
                 const std::vector<std::string>& n_arg, const std::vector<std::string>& m_arg, std::size_t episodes,
                 std::size_t budget) {
    require_format(c.format, {"csv"});
    sim::SimOptions opts;
    opts.threads = c.threads;
    opts.budget = budget;
    const auto rows = metrics::theory_vs_sim(pf.get(), parse_modes(mode_arg), index_list(n_arg, "--n"),
                                             index_list(m_arg, "--m"), episodes, c.seed, opts);
    emit(sub, c.out, c.seed, metrics::to_csv(rows));
    for (const auto& r : rows)
        if (r.result.degenerate) {
            std::cerr << "warning: budget exhausted in " << r.result.budget_exhausted << " of " << r.result.episodes
                      << " episodes at n=" << r.n << " mode=" << sim::to_string(r.mode.mode) << "\n";
            return degenerate;
        }
    return ok;
}

int cmd_gen_data(const CLI::App& sub, const Common& c, const std::string& task, const std::string& style,
                 double noise, std::size_t count, double easy_fraction) {
    require_format(c.format, {"jsonl"});
    if (c.out.empty()) throw UsageError("gen-data needs --out");
    CorpusSpec spec;
    spec.count = count;
    spec.easy_fraction = easy_fraction;
    spec.style = parse_cot_style(style);
    spec.proposal_noise = noise;
    spec.seed = c.seed;
    spec.threads = c.threads;
    with_task(parse_task_kind(task), [&](auto t) {
        using T = decltype(t);
        LineWriter w(c.out);
        generate_corpus<T>(spec, [&](CotExample<T>&& ex) { w.write(to_json(ex).dump()); });
        w.close();
    });
    write_manifest(sub, c.out, c.seed);
    return ok;
}

struct RunTaskFlags {
    std::string task = "mult";
    std::string tier = "id_hard";
    std::string style = "binary";
    std::string mode = "rmtp";
    std::size_t m = 4;
    double noise = 0.2;
    double e_minus = 0.0;
    double e_plus = 0.0;
    std::size_t episodes = 2000;
    std::size_t budget = 0;
    std::size_t reflective_budget = 0;
};

int cmd_run_task(const CLI::App& sub, const Common& c, const RunTaskFlags& f) {
    require_format(c.format, {"csv", "jsonl"});
    TaskRunSpec spec;
    spec.tier = parse_tier(f.tier);
    spec.queries = f.episodes;
    spec.policy_error = f.noise;
    spec.style = parse_verify_style(f.style);
    spec.e_minus = f.e_minus;
    spec.e_plus = f.e_plus;
    spec.mode = {sim::parse_mode(f.mode), f.m};
    spec.seed = c.seed;
    spec.threads = c.threads;
    return with_task(parse_task_kind(f.task), [&](auto t) {
        using T = decltype(t);
        ReflectConfig config = default_task_config<T>();
        if (f.budget) config.total_budget = f.budget;
        if (f.reflective_budget) config.reflective_budget = f.reflective_budget;
        spec.config = config;
        const auto records = run_task<T>(spec);
        if (c.format == "jsonl") {
            if (c.out.empty()) throw UsageError("--format jsonl needs --out");
            write_jsonl(c.out, records);
            write_manifest(sub, c.out, c.seed);
        } else {
            emit(sub, c.out, c.seed, metrics::to_csv(metrics::accuracy_table(records)));
        }
        return static_cast<int>(ok);
    });
}

int cmd_estimate_errors(const CLI::App& sub, const Common& c, const std::string& in) {
    require_format(c.format, {"csv"});
    const auto kind = peek_task(in);
    metrics::ErrorEstimate est;
    if (kind)
        with_task(*kind, [&](auto t) {
            using T = decltype(t);
            est = metrics::estimate_verification_errors(read_records_jsonl<T>(in), OracleVerifier{});
        });
    emit(sub, c.out, c.seed, metrics::to_csv(est));
    if (!est.e_plus_hat || !est.e_minus_hat) {
        std::cerr << "warning: an error rate is undefined (no first attempts on one side)\n";
        return degenerate;
    }
    return ok;
}

int cmd_report(const CLI::App& sub, const Common& c, const std::string& kind, const std::string& in,
               const ParamFlags& pf, const std::vector<std::string>& mode_arg, const std::vector<std::string>& n_arg,
               const std::vector<std::string>& m_arg, std::size_t episodes) {
    require_format(c.format, {"csv"});
    if (kind == "theory-vs-sim") {
        sim::SimOptions opts;
        opts.threads = c.threads;
        const auto rows = metrics::theory_vs_sim(pf.get(), parse_modes(mode_arg), index_list(n_arg, "--n"),
                                                 index_list(m_arg, "--m"), episodes, c.seed, opts);
        emit(sub, c.out, c.seed, metrics::to_csv(rows));
        const bool bad = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.result.degenerate; });
        return bad ? degenerate : ok;
    }
    if (kind != "accuracy" && kind != "frequency") throw UsageError("unknown --kind " + kind);
    if (in.empty()) throw UsageError("report --kind " + kind + " needs --in");
    const auto task = peek_task(in);
    if (!task) throw InputError(in + " holds no records");
    const std::string text = with_task(*task, [&](auto t) {
        using T = decltype(t);
        const auto records = read_records_jsonl<T>(in);
        return kind == "accuracy" ? metrics::to_csv(metrics::accuracy_table(records))
                                  : metrics::to_csv(metrics::reflection_frequency(records));
    });
    emit(sub, c.out, c.seed, text);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(std::move(args));
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }

    CLI::App app{"Reflective reasoning lab: theory, simulation, tasks and corpora"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::vector<std::string> ns{"1:30"}, ms{"1", "2", "4", "16", "64"}, modes{"none", "rmtp", "rtbs"};
    ParamFlags params;

    auto* theory_cmd = app.add_subcommand("theory-curve", "accuracy curves from the recursions");
    Common theory_c;
    theory_c.add(theory_cmd, "csv");
    params.add(theory_cmd);
    theory_cmd->add_option("--n", ns, "scales: integers or a:b ranges (largest one is n_max)")->delimiter(',');
    theory_cmd->add_option("--m", ms, "RTBS widths")->delimiter(',');

    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo accuracy against theory");
    Common sim_c;
    sim_c.add(sim_cmd, "csv");
    ParamFlags sim_params;
    sim_params.add(sim_cmd);
    std::vector<std::string> sim_modes{"rmtp"}, sim_ns{"10"}, sim_ms{"4"};
    std::size_t sim_episodes = 200000, sim_budget = 1'000'000;
    sim_cmd->add_option("--mode", sim_modes, "none, rmtp and/or rtbs")->delimiter(',');
    sim_cmd->add_option("--n", sim_ns, "scales")->delimiter(',');
    sim_cmd->add_option("--m", sim_ms, "RTBS widths")->delimiter(',');
    sim_cmd->add_option("--episodes", sim_episodes, "episodes per point");
    sim_cmd->add_option("--budget", sim_budget, "event budget per episode");

    auto* gen_cmd = app.add_subcommand("gen-data", "generate a CoT corpus as JSONL");
    Common gen_c;
    gen_c.add(gen_cmd, "jsonl");
    std::string gen_task = "mult", gen_style = "none";
    double gen_noise = 0.0, gen_easy = 0.5;
    std::size_t gen_count = 0;
    gen_cmd->add_option("--task", gen_task, "mult or sudoku");
    gen_cmd->add_option("--style", gen_style, "none, binary, detailed or optional_detailed");
    gen_cmd->add_option("--noise", gen_noise, "proposal noise of reflective styles");
    gen_cmd->add_option("--count", gen_count, "examples (0: task default)");
    gen_cmd->add_option("--easy-fraction", gen_easy, "share of ID-Easy examples");

    auto* run_cmd = app.add_subcommand("run-task", "run Mult or Sudoku episodes");
    Common run_c;
    run_c.add(run_cmd, "csv");
    RunTaskFlags rf;
    run_cmd->add_option("--task", rf.task, "mult or sudoku");
    run_cmd->add_option("--tier", rf.tier, "id_easy, id_hard or ood_hard");
    run_cmd->add_option("--style", rf.style, "verification style: binary or detailed");
    run_cmd->add_option("--mode", rf.mode, "none, rmtp or rtbs");
    run_cmd->add_option("--m", rf.m, "RTBS width");
    run_cmd->add_option("--noise", rf.noise, "policy error probability");
    run_cmd->add_option("--e-minus", rf.e_minus, "injected verifier false-negative rate");
    run_cmd->add_option("--e-plus", rf.e_plus, "injected verifier false-positive rate");
    run_cmd->add_option("--episodes", rf.episodes, "number of queries");
    run_cmd->add_option("--budget", rf.budget, "total event budget (0: task default)");
    run_cmd->add_option("--reflective-budget", rf.reflective_budget, "verified-proposal budget (0: task default)");

    auto* est_cmd = app.add_subcommand("estimate-errors", "first-attempt verifier error rates of records");
    Common est_c;
    est_c.add(est_cmd, "csv");
    std::string est_in;
    est_cmd->add_option("--in", est_in, "episode-record JSONL")->required();

    auto* rep_cmd = app.add_subcommand("report", "accuracy, reflection frequency or theory-vs-sim tables");
    Common rep_c;
    rep_c.add(rep_cmd, "csv");
    ParamFlags rep_params;
    rep_params.add(rep_cmd);
    std::string rep_kind = "accuracy", rep_in;
    std::vector<std::string> rep_modes{"none", "rmtp", "rtbs"}, rep_ns{"1:30"}, rep_ms{"1", "2", "4", "16", "64"};
    std::size_t rep_episodes = 200000;
    rep_cmd->add_option("--kind", rep_kind, "accuracy, frequency or theory-vs-sim");
    rep_cmd->add_option("--in", rep_in, "episode-record JSONL (accuracy, frequency)");
    rep_cmd->add_option("--mode", rep_modes, "modes (theory-vs-sim)")->delimiter(',');
    rep_cmd->add_option("--n", rep_ns, "scales (theory-vs-sim)")->delimiter(',');
    rep_cmd->add_option("--m", rep_ms, "RTBS widths (theory-vs-sim)")->delimiter(',');
    rep_cmd->add_option("--episodes", rep_episodes, "episodes per point (theory-vs-sim)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (theory_cmd->parsed()) return cmd_theory_curve(*theory_cmd, theory_c, params, ns, ms);
        if (sim_cmd->parsed())
            return cmd_simulate(*sim_cmd, sim_c, sim_params, sim_modes, sim_ns, sim_ms, sim_episodes, sim_budget);
        if (gen_cmd->parsed()) return cmd_gen_data(*gen_cmd, gen_c, gen_task, gen_style, gen_noise, gen_count, gen_easy);
        if (run_cmd->parsed()) return cmd_run_task(*run_cmd, run_c, rf);
        if (est_cmd->parsed()) return cmd_estimate_errors(*est_cmd, est_c, est_in);
        if (rep_cmd->parsed())
            return cmd_report(*rep_cmd, rep_c, rep_kind, rep_in, rep_params, rep_modes, rep_ns, rep_ms, rep_episodes);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const NoSolutionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return usage;
}
