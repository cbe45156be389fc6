#include "archon/cli.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "archon/adl_parser.hpp"
#include "archon/checker.hpp"
#include "archon/codegen.hpp"
#include "archon/declarative.hpp"
#include "archon/diag.hpp"
#include "archon/model.hpp"
#include "archon/psc.hpp"

using nlohmann::ordered_json;

namespace archon {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Architecture load_model(const std::string& path, std::ostream& err) {
    std::string text = slurp(path);
    Architecture arch;
    try {
        arch = parse_architecture(text);
    } catch (const ParseError& e) {
        throw Error(path + ":" + e.what());
    }
    ValidationReport report = validate(arch);
    if (!report.ok()) {
        err << format_findings(report.findings);
        throw Error(path + ": architecture is not valid");
    }
    return arch;
}

struct LoadedProperty {
    PscProperty source;
    BoundProperty bound;
};

std::vector<LoadedProperty> load_properties(const std::vector<std::string>& paths,
                                            const Architecture& arch, std::ostream& err) {
    std::vector<LoadedProperty> out;
    for (const std::string& path : paths) {
        std::string text = slurp(path);
        std::vector<PscProperty> props;
        try {
            props = parse_properties(text);
        } catch (const ParseError& e) {
            throw Error(path + ":" + e.what());
        }
        for (PscProperty& p : props) {
            BindResult bound = bind(p, arch);
            for (const Finding& w : bound.warnings)
                err << "warning: " << p.name << ": " << w.message << "\n";
            out.push_back({std::move(p), std::move(bound.property)});
        }
    }
    return out;
}

std::vector<std::string> dump_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

ordered_json cex_json(const Architecture& arch, const Counterexample& cex) {
    ordered_json j;
    switch (cex.kind) {
        case CexKind::DeadlockTrace: j["kind"] = "deadlock"; break;
        case CexKind::SafetyPrefix: j["kind"] = "safety-prefix"; break;
        case CexKind::LivenessLasso: j["kind"] = "liveness-lasso"; break;
    }
    j["prefix"] = dump_lines(dump_trace(arch, cex.prefix));
    if (!cex.cycle.empty()) j["cycle"] = dump_lines(dump_trace(arch, cex.cycle));
    return j;
}

class Timer {
public:
    long long ms() const {
        auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(std::ostream& out, bool json, const ordered_json& j, const std::string& text) {
    if (json)
        out << j.dump(2) << "\n";
    else
        out << text;
}

const char* verdict_name(Verdict v) { return v == Verdict::Valid ? "valid" : "violated"; }

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"architecture verification and code generation"};
    app.require_subcommand(1);

    std::string model_path;
    std::vector<std::string> props_paths;
    std::string format = "text";
    std::string templates_dir;
    std::string out_dir;
    std::string prop_name;
    int state_cap = 1000000;
    int threads = 1;
    int steps = 50;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd, bool with_props) {
        cmd->add_option("--model", model_path, "architecture file")->required();
        if (with_props) cmd->add_option("--props", props_paths, "property file(s)");
        cmd->add_option("--format", format, "report format")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("--state-cap", state_cap, "reachable-state bound")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--threads", threads, "exploration threads")->check(CLI::PositiveNumber);
        return cmd;
    };

    CLI::App* validate_cmd = add_common(app.add_subcommand("validate", "parse and validate"), true);
    CLI::App* check_cmd =
        add_common(app.add_subcommand("check", "deadlock freedom and every property"), true);
    CLI::App* verify_cmd =
        add_common(app.add_subcommand("verify", "check one named property"), true);
    verify_cmd->add_option("property", prop_name, "property name")->required();
    CLI::App* stats_cmd =
        add_common(app.add_subcommand("stats", "state-space statistics"), false);
    CLI::App* simulate_cmd =
        add_common(app.add_subcommand("simulate", "random rendezvous walk"), false);
    simulate_cmd->add_option("--seed", seed, "random seed");
    simulate_cmd->add_option("--steps", steps, "walk length")->check(CLI::PositiveNumber);
    CLI::App* generate_cmd =
        add_common(app.add_subcommand("generate", "render component skeletons"), false);
    generate_cmd->add_option("--templates", templates_dir, "template directory");
    generate_cmd->add_option("--out", out_dir, "output directory")->required();
    CLI::App* regen_cmd = add_common(
        app.add_subcommand("regen", "re-render, keeping user regions"), false);
    regen_cmd->add_option("--templates", templates_dir, "template directory");
    regen_cmd->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        Timer timer;
        ExploreOptions opts;
        opts.state_cap = state_cap;
        opts.threads = threads;
        const bool json = format == "json";

        if (validate_cmd->parsed()) {
            Architecture arch = load_model(model_path, err);
            std::vector<LoadedProperty> props = load_properties(props_paths, arch, err);
            ordered_json j;
            j["command"] = "validate";
            j["model"] = model_path;
            j["architecture"] = arch.name;
            ordered_json names = ordered_json::array();
            for (const LoadedProperty& p : props) names.push_back(p.bound.name);
            j["properties"] = names;
            j["ok"] = true;
            std::ostringstream text;
            text << "ok: " << arch.name << " with " << props.size() << " properties\n";
            emit(out, json, j, text.str());
            return 0;
        }

        if (check_cmd->parsed() || verify_cmd->parsed()) {
            Architecture arch = load_model(model_path, err);
            std::vector<LoadedProperty> props = load_properties(props_paths, arch, err);
            if (verify_cmd->parsed()) {
                std::vector<LoadedProperty> picked;
                for (LoadedProperty& p : props)
                    if (p.bound.name == prop_name) {
                        picked.push_back(std::move(p));
                        break;
                    }
                if (picked.empty()) throw Error("property '" + prop_name + "' not found");
                props = std::move(picked);
            }

            StateGraph graph = explore(arch, opts);
            std::optional<Counterexample> deadlock;
            if (check_cmd->parsed()) deadlock = check_deadlock(arch, graph);

            ordered_json j;
            j["command"] = check_cmd->parsed() ? "check" : "verify";
            j["model"] = model_path;
            j["architecture"] = arch.name;
            j["states"] = static_cast<int>(graph.states.size());

            std::ostringstream verdict_line;
            std::ostringstream dumps;
            bool failed = false;

            if (check_cmd->parsed()) {
                verdict_line << "deadlock: " << (deadlock ? "fail" : "pass");
                j["deadlock"] = deadlock ? "fail" : "pass";
                if (deadlock) {
                    failed = true;
                    j["deadlock_counterexample"] = cex_json(arch, *deadlock);
                    dumps << "--- deadlock ---\n" << dump_counterexample(arch, *deadlock);
                } else {
                    j["deadlock_counterexample"] = nullptr;
                }
            }

            ordered_json jprops = ordered_json::array();
            bool first = !check_cmd->parsed();
            for (const LoadedProperty& p : props) {
                PropertyResult r = check_property(arch, graph, p.bound);
                if (!first) verdict_line << "; ";
                first = false;
                verdict_line << p.bound.name << ": " << verdict_name(r.verdict);
                ordered_json pj;
                pj["name"] = p.bound.name;
                pj["verdict"] = verdict_name(r.verdict);
                pj["product_states"] = r.product_states;
                pj["product_diameter"] = r.product_diameter;
                pj["counterexample"] = nullptr;
                if (r.verdict == Verdict::Violated) {
                    failed = true;
                    if (r.cex) {
                        pj["counterexample"] = cex_json(arch, *r.cex);
                        dumps << "--- " << p.bound.name << " ---\n"
                              << dump_counterexample(arch, *r.cex);
                    }
                }
                jprops.push_back(pj);
            }
            j["properties"] = jprops;
            j["elapsed_ms"] = timer.ms();

            std::ostringstream text;
            text << verdict_line.str() << "\n";
            text << "states: " << graph.states.size() << "\n";
            text << dumps.str();
            text << "elapsed: " << timer.ms() << " ms\n";
            emit(out, json, j, text.str());
            return failed ? 1 : 0;
        }

        if (stats_cmd->parsed()) {
            Architecture arch = load_model(model_path, err);
            StateGraph graph = explore(arch, opts);
            size_t unfired = 0;
            for (const auto& per : graph.unfired) unfired += per.size();
            ordered_json j;
            j["command"] = "stats";
            j["model"] = model_path;
            j["architecture"] = arch.name;
            j["components"] = static_cast<int>(arch.components.size());
            j["channels"] = static_cast<int>(arch.channels.size());
            j["states"] = static_cast<int>(graph.states.size());
            j["edges"] = static_cast<int>(graph.edges.size());
            j["deadlocks"] = static_cast<int>(graph.deadlocks.size());
            j["terminations"] = static_cast<int>(graph.terminations.size());
            j["unfired_transitions"] = static_cast<int>(unfired);
            j["elapsed_ms"] = timer.ms();
            std::ostringstream text;
            text << "architecture: " << arch.name << "\n"
                 << "components: " << arch.components.size() << "\n"
                 << "channels: " << arch.channels.size() << "\n"
                 << "states: " << graph.states.size() << "\n"
                 << "edges: " << graph.edges.size() << "\n"
                 << "deadlocks: " << graph.deadlocks.size() << "\n"
                 << "terminations: " << graph.terminations.size() << "\n"
                 << "unfired transitions: " << unfired << "\n"
                 << "elapsed: " << timer.ms() << " ms\n";
            emit(out, json, j, text.str());
            return 0;
        }

        if (simulate_cmd->parsed()) {
            Architecture arch = load_model(model_path, err);
            Trace trace = simulate(arch, seed, steps);
            ordered_json j;
            j["command"] = "simulate";
            j["model"] = model_path;
            j["seed"] = seed;
            j["steps"] = dump_lines(dump_trace(arch, trace.steps));
            j["hit_sink"] = trace.hit_sink;
            std::ostringstream text;
            text << dump_trace(arch, trace.steps);
            if (trace.hit_sink) text << "(sink reached)\n";
            emit(out, json, j, text.str());
            return 0;
        }

        if (generate_cmd->parsed() || regen_cmd->parsed()) {
            Architecture arch = load_model(model_path, err);
            TemplateSet templates =
                templates_dir.empty() ? default_templates() : load_templates(templates_dir);
            GeneratedFileSet set;
            int orphans = 0;
            if (generate_cmd->parsed()) {
                set = render(arch, templates, out_dir);
            } else {
                GeneratedFileSet previous = read_files(out_dir, templates);
                GeneratedFileSet fresh = render(arch, templates);
                set = merge_user_regions(previous, fresh, templates);
                write_files(set, out_dir);
                if (const GeneratedFile* rep = set.find("ORPHANED.txt"))
                    for (const std::string& line : dump_lines(rep->content))
                        if (line.rfind("== ", 0) == 0) ++orphans;
            }
            ordered_json j;
            j["command"] = generate_cmd->parsed() ? "generate" : "regen";
            j["model"] = model_path;
            j["out"] = out_dir;
            ordered_json names = ordered_json::array();
            for (const GeneratedFile& f : set.files) names.push_back(f.name);
            j["files"] = names;
            if (regen_cmd->parsed()) j["orphaned_regions"] = orphans;
            std::ostringstream text;
            for (const GeneratedFile& f : set.files) text << f.name << "\n";
            text << "out: " << out_dir << "\n";
            if (regen_cmd->parsed()) text << "orphaned regions: " << orphans << "\n";
            emit(out, json, j, text.str());
            return 0;
        }

        throw Error("no subcommand");
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace archon
