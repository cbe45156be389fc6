#include "archon/codegen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "archon/template_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace archon {

namespace {

constexpr const char* kRegionBegin = "//WRITE YOUR CODE HERE";
constexpr const char* kRegionEnd = "//END YOUR CODE HERE";

std::string trimmed(const std::string& line) {
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = line.find_last_not_of(" \t\r");
    return line.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodegenError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

PortPlan plan_ports(const Architecture& arch) {
    PortPlan plan;
    plan.by_component.resize(arch.components.size());

    // Channels grouped by ordered component pair, in declaration order of
    // the pair's first channel.
    struct PairChannels {
        int src = -1;
        int dst = -1;
        std::vector<int> channels;
    };
    std::vector<PairChannels> pairs;
    std::map<std::pair<int, int>, size_t> pair_index;
    for (size_t c = 0; c < arch.channels.size(); ++c) {
        const Channel& ch = arch.channels[c];
        auto key = std::make_pair(ch.source, ch.target);
        auto it = pair_index.find(key);
        if (it == pair_index.end()) {
            pair_index.emplace(key, pairs.size());
            pairs.push_back({ch.source, ch.target, {static_cast<int>(c)}});
        } else {
            pairs[it->second].channels.push_back(static_cast<int>(c));
        }
    }

    for (const PairChannels& p : pairs) {
        const StateMachine* sender = arch.machine_for(p.src);
        const StateMachine* receiver = arch.machine_for(p.dst);
        if (sender == nullptr || receiver == nullptr) continue;

        // A method per message both endpoints implement, in the order the
        // sender first sends it.
        std::vector<PortMethod> methods;
        std::set<std::pair<std::string, int>> seen;
        for (const Transition& t : sender->transitions) {
            if (t.dir != Direction::Send) continue;
            if (std::find(p.channels.begin(), p.channels.end(), t.channel) == p.channels.end())
                continue;
            if (!seen.insert({t.label, t.channel}).second) continue;
            bool matched = false;
            for (const Transition& r : receiver->transitions)
                if (r.dir == Direction::Receive && r.channel == t.channel && r.label == t.label) {
                    matched = true;
                    break;
                }
            if (matched) methods.push_back({t.label, t.channel});
        }
        if (methods.empty()) continue;

        std::string name = arch.components[p.src].name + "_TO_" + arch.components[p.dst].name;
        plan.by_component[p.dst].push_back({name, p.src, PortDir::Provides, methods});
        plan.by_component[p.src].push_back({name, p.dst, PortDir::Requires, methods});
    }

    for (auto& ports : plan.by_component)
        std::stable_partition(ports.begin(), ports.end(),
                              [](const Port& p) { return p.dir == PortDir::Provides; });
    return plan;
}

int SMEncoding::state_const(const std::string& name) const {
    for (size_t i = 0; i < state_names.size(); ++i)
        if (state_names[i] == name) return static_cast<int>(i);
    return -1;
}

int SMEncoding::transition_const(const std::string& label) const {
    for (size_t i = 0; i < transition_labels.size(); ++i)
        if (transition_labels[i] == label) return static_cast<int>(i);
    return -1;
}

SMEncoding encode_state_machine(const StateMachine& m) {
    SMEncoding enc;
    enc.initial = m.initial;
    for (const State& s : m.states) enc.state_names.push_back(s.name);
    for (const Transition& t : m.transitions)
        if (enc.transition_const(t.label) < 0) enc.transition_labels.push_back(t.label);
    enc.rows.resize(m.states.size());
    for (const Transition& t : m.transitions)
        enc.rows[static_cast<size_t>(t.from)].push_back(
            {enc.transition_const(t.label), t.to, t.dir == Direction::Receive ? 1 : 0});
    return enc;
}

int trans_fire(const SMEncoding& enc, int current, int t) {
    if (current < 0 || current >= static_cast<int>(enc.rows.size()))
        throw ProtocolViolation("state constant " + std::to_string(current) + " out of range");
    for (const SMEntry& e : enc.rows[static_cast<size_t>(current)])
        if (e.t == t) return e.target;
    std::string tn = t >= 0 && t < static_cast<int>(enc.transition_labels.size())
                         ? "'" + enc.transition_labels[static_cast<size_t>(t)] + "'"
                         : std::to_string(t);
    throw ProtocolViolation("transition " + tn + " not allowed in state '" +
                            enc.state_names[static_cast<size_t>(current)] + "'");
}

std::optional<int> try_fire(const SMEncoding& enc, int current, int t) {
    if (current < 0 || current >= static_cast<int>(enc.rows.size())) return std::nullopt;
    for (const SMEntry& e : enc.rows[static_cast<size_t>(current)])
        if (e.t == t) return e.target;
    return std::nullopt;
}

const GeneratedFile* GeneratedFileSet::find(const std::string& name) const {
    for (const GeneratedFile& f : files)
        if (f.name == name) return &f;
    return nullptr;
}

namespace {

json port_context(const Architecture& arch, const Port& port) {
    json methods = json::array();
    std::string joined;
    for (const PortMethod& m : port.methods) {
        methods.push_back({{"label", m.label}});
        if (!joined.empty()) joined += ", ";
        joined += m.label;
    }
    return {{"name", port.name},
            {"peer", arch.components[static_cast<size_t>(port.peer)].name},
            {"methods", methods},
            {"methods_joined", joined}};
}

// The generated class must not declare the same identifier twice.
void reject_ambiguity(const Architecture& arch, const PortPlan& plan) {
    for (size_t c = 0; c < arch.components.size(); ++c) {
        const std::string& comp = arch.components[c].name;
        std::map<std::string, int> members;
        for (const Component& m : arch.components) ++members["behaviour_" + m.name];
        for (const Port& p : plan.by_component[c]) {
            if (p.dir == PortDir::Requires) {
                ++members[p.name];
                std::set<std::string> labels;
                for (const PortMethod& m : p.methods)
                    if (!labels.insert(m.label).second)
                        throw CodegenError("component '" + comp + "': message '" + m.label +
                                           "' appears twice on port '" + p.name +
                                           "'; give the messages distinct names");
            } else {
                for (const PortMethod& m : p.methods) ++members[m.label];
            }
        }
        for (const auto& [name, count] : members)
            if (count > 1)
                throw CodegenError("component '" + comp + "': generated code would declare '" +
                                   name + "' " + std::to_string(count) +
                                   " times; rename the colliding messages or components");
    }
}

json machines_context(const Architecture& arch) {
    json machines = json::array();
    for (const Component& c : arch.components) machines.push_back({{"name", c.name}});
    return machines;
}

std::string render_component(const Architecture& arch, const PortPlan& plan, size_t c,
                             const TemplateSet& templates) {
    json provides = json::array();
    json requires_ = json::array();
    for (const Port& p : plan.by_component[c])
        (p.dir == PortDir::Provides ? provides : requires_).push_back(port_context(arch, p));
    json ctx = {{"component", arch.components[c].name},
                {"machines", machines_context(arch)},
                {"provides_ports", provides},
                {"requires_ports", requires_}};
    return render_template(templates.component, ctx);
}

std::string render_state_machine(const Architecture& arch, size_t c, const TemplateSet& templates) {
    const StateMachine* m = arch.machine_for(static_cast<int>(c));
    SMEncoding enc = encode_state_machine(*m);

    json states = json::array();
    for (size_t i = 0; i < enc.state_names.size(); ++i)
        states.push_back({{"sname", enc.state_names[i]}, {"value", static_cast<int>(i)}});

    json transitions = json::array();
    for (size_t i = 0; i < enc.transition_labels.size(); ++i)
        transitions.push_back({{"label", enc.transition_labels[i]}, {"value", static_cast<int>(i)}});

    json entries = json::array();
    std::vector<int> offsets{0};
    int total = 0;
    for (size_t s = 0; s < enc.rows.size(); ++s) {
        for (const SMEntry& e : enc.rows[s]) {
            std::ostringstream text;
            text << "{T_" << enc.transition_labels[static_cast<size_t>(e.t)] << ", S_"
                 << enc.state_names[static_cast<size_t>(e.target)] << ", " << e.flag << "},  // "
                 << enc.state_names[s];
            entries.push_back({{"text", text.str()}});
            ++total;
        }
        offsets.push_back(total);
    }
    std::string offsets_joined;
    for (size_t i = 0; i < offsets.size(); ++i) {
        if (i > 0) offsets_joined += ", ";
        offsets_joined += std::to_string(offsets[i]);
    }

    json ctx = {{"component", arch.components[c].name},
                {"states", states},
                {"transitions", transitions},
                {"has_transitions", !enc.transition_labels.empty()},
                {"initial", enc.state_names[static_cast<size_t>(enc.initial)]},
                {"entries", entries},
                {"has_entries", total > 0},
                {"n_entries", total},
                {"offsets_joined", offsets_joined},
                {"n_offsets", static_cast<int>(offsets.size())}};
    return render_template(templates.state_machine, ctx);
}

std::string render_main(const Architecture& arch, const PortPlan& plan,
                        const TemplateSet& templates) {
    json components = json::array();
    for (const Component& c : arch.components)
        components.push_back({{"name", c.name}, {"comp", c.name}});

    json wirings = json::array();
    for (size_t c = 0; c < arch.components.size(); ++c)
        for (const Port& p : plan.by_component[c]) {
            if (p.dir != PortDir::Requires) continue;
            for (const PortMethod& m : p.methods)
                wirings.push_back(
                    {{"src", arch.components[c].name},
                     {"port", p.name},
                     {"label", m.label},
                     {"dst", arch.components[static_cast<size_t>(p.peer)].name}});
        }

    json ctx = {{"components", components},
                {"machines", machines_context(arch)},
                {"wirings", wirings},
                {"has_wirings", !wirings.empty()}};
    return render_template(templates.main, ctx);
}

}  // namespace

GeneratedFileSet render(const Architecture& arch, const TemplateSet& templates) {
    for (size_t c = 0; c < arch.components.size(); ++c)
        if (arch.machine_for(static_cast<int>(c)) == nullptr)
            throw CodegenError("component '" + arch.components[c].name + "' has no state machine");

    PortPlan plan = plan_ports(arch);
    reject_ambiguity(arch, plan);

    GeneratedFileSet set;
    for (size_t c = 0; c < arch.components.size(); ++c)
        set.files.push_back({arch.components[c].name + "." + templates.component_ext,
                             render_component(arch, plan, c, templates)});
    for (size_t c = 0; c < arch.components.size(); ++c)
        set.files.push_back({"SM_" + arch.components[c].name + "." + templates.state_machine_ext,
                             render_state_machine(arch, c, templates)});
    set.files.push_back({"MAIN." + templates.main_ext, render_main(arch, plan, templates)});
    set.files.push_back({"ORPHANED.txt", ""});
    return set;
}

GeneratedFileSet render(const Architecture& arch, const TemplateSet& templates,
                        const std::string& out_dir) {
    GeneratedFileSet set = render(arch, templates);
    write_files(set, out_dir);
    return set;
}

void write_files(const GeneratedFileSet& set, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CodegenError("cannot create directory '" + dir + "': " + ec.message());
    for (const GeneratedFile& f : set.files) {
        fs::path path = fs::path(dir) / f.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw CodegenError("cannot write '" + path.string() + "'");
        out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
        if (!out) throw CodegenError("cannot write '" + path.string() + "'");
    }
}

GeneratedFileSet read_files(const std::string& dir, const TemplateSet& templates) {
    GeneratedFileSet set;
    if (!fs::exists(dir)) return set;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        bool ours = name == "ORPHANED.txt" || name.ends_with("." + templates.component_ext) ||
                    name.ends_with("." + templates.state_machine_ext) ||
                    name.ends_with("." + templates.main_ext);
        if (ours) names.push_back(name);
    }
    std::sort(names.begin(), names.end());
    for (const std::string& name : names)
        set.files.push_back({name, read_text_file((fs::path(dir) / name).string())});
    return set;
}

namespace {

struct CompiledAnchor {
    std::regex re;
    std::string label;
};

std::vector<CompiledAnchor> compile_anchors(const TemplateSet& templates) {
    std::vector<CompiledAnchor> out;
    for (const RegionAnchor& a : templates.region_anchors) {
        try {
            out.push_back({std::regex(a.pattern), a.label});
        } catch (const std::regex_error& e) {
            throw CodegenError("bad region anchor '" + a.pattern + "': " + e.what());
        }
    }
    return out;
}

std::optional<std::string> anchor_label(const std::vector<CompiledAnchor>& anchors,
                                        const std::string& line) {
    for (const CompiledAnchor& a : anchors) {
        std::smatch m;
        if (!std::regex_search(line, m, a.re)) continue;
        if (a.label == "$1" && m.size() > 1) return m[1].str();
        return a.label;
    }
    return std::nullopt;
}

}  // namespace

std::vector<UserRegion> extract_user_regions(const TemplateSet& templates,
                                             const std::string& file_name,
                                             const std::string& content) {
    std::vector<CompiledAnchor> anchors = compile_anchors(templates);
    std::vector<UserRegion> regions;
    std::set<std::string> labels;

    std::optional<std::string> last_anchor;
    bool in_region = false;
    std::string body;
    std::string current_label;

    for (const std::string& line : split_lines(content)) {
        std::string t = trimmed(line);
        if (in_region) {
            if (t == kRegionEnd) {
                regions.push_back({current_label, body});
                body.clear();
                in_region = false;
            } else if (t == kRegionBegin) {
                throw CodegenError(file_name + ": nested '" + std::string(kRegionBegin) + "'");
            } else {
                body += line;
                body += '\n';
            }
            continue;
        }
        if (t == kRegionBegin) {
            if (!last_anchor)
                throw CodegenError(file_name + ": user region with no enclosing method");
            current_label = *last_anchor;
            if (!labels.insert(current_label).second)
                throw CodegenError(file_name + ": two user regions under '" + current_label + "'");
            in_region = true;
        } else if (t == kRegionEnd) {
            throw CodegenError(file_name + ": '" + std::string(kRegionEnd) + "' without begin");
        } else if (auto a = anchor_label(anchors, line)) {
            last_anchor = a;
        }
    }
    if (in_region)
        throw CodegenError(file_name + ": unterminated user region '" + current_label + "'");
    return regions;
}

namespace {

// Rebuilds one fresh file with its region bodies swapped for the previous
// content under the same label.
std::string merge_one_file(const TemplateSet& templates, const std::string& file_name,
                           const std::string& fresh,
                           const std::map<std::string, std::string>& previous_regions) {
    std::vector<CompiledAnchor> anchors = compile_anchors(templates);
    std::ostringstream out;
    std::optional<std::string> last_anchor;
    bool in_region = false;
    bool replace = false;

    std::vector<std::string> lines = split_lines(fresh);
    bool final_newline = !fresh.empty() && fresh.back() == '\n';
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        bool last = i + 1 == lines.size();
        std::string t = trimmed(line);
        if (in_region) {
            if (t == kRegionEnd) {
                in_region = false;
                out << line;
                if (!last || final_newline) out << '\n';
            } else if (!replace) {
                out << line;
                if (!last || final_newline) out << '\n';
            }
            continue;
        }
        if (t == kRegionBegin && last_anchor) {
            out << line << '\n';
            auto it = previous_regions.find(*last_anchor);
            replace = it != previous_regions.end();
            if (replace) out << it->second;
            in_region = true;
            continue;
        }
        if (auto a = anchor_label(anchors, line)) last_anchor = a;
        out << line;
        if (!last || final_newline) out << '\n';
    }
    (void)file_name;
    return out.str();
}

}  // namespace

GeneratedFileSet merge_user_regions(const GeneratedFileSet& previous, const GeneratedFileSet& fresh,
                                    const TemplateSet& templates) {
    // (file, label) -> content for everything the previous output held.
    std::map<std::string, std::map<std::string, std::string>> prev;
    std::vector<std::pair<std::string, UserRegion>> prev_order;
    for (const GeneratedFile& f : previous.files) {
        if (f.name == "ORPHANED.txt") continue;
        for (const UserRegion& r : extract_user_regions(templates, f.name, f.content)) {
            prev[f.name][r.label] = r.content;
            prev_order.push_back({f.name, r});
        }
    }

    GeneratedFileSet merged;
    std::set<std::pair<std::string, std::string>> fresh_keys;
    for (const GeneratedFile& f : fresh.files) {
        if (f.name == "ORPHANED.txt") {
            merged.files.push_back(f);
            continue;
        }
        for (const UserRegion& r : extract_user_regions(templates, f.name, f.content))
            fresh_keys.insert({f.name, r.label});
        auto it = prev.find(f.name);
        std::map<std::string, std::string> empty;
        merged.files.push_back(
            {f.name, merge_one_file(templates, f.name, f.content,
                                    it == prev.end() ? empty : it->second)});
    }

    // Orphans are appended to the carried-over report, never dropped.
    std::string orphaned;
    if (const GeneratedFile* p = previous.find("ORPHANED.txt")) orphaned = p->content;
    for (const auto& [file, region] : prev_order) {
        if (fresh_keys.count({file, region.label})) continue;
        orphaned += "== " + file + " :: " + region.label + " ==\n";
        orphaned += region.content;
    }
    for (GeneratedFile& f : merged.files)
        if (f.name == "ORPHANED.txt") f.content = orphaned;
    if (merged.find("ORPHANED.txt") == nullptr) merged.files.push_back({"ORPHANED.txt", orphaned});
    return merged;
}

namespace {

struct PortManifest {
    std::string port;
    bool provides = false;
    std::vector<std::string> labels;
    int line = 0;
};

std::vector<PortManifest> parse_manifests(const std::string& content) {
    static const std::regex re("^// port (\\w+) (provides|requires) (.+)$");
    std::vector<PortManifest> out;
    int lineno = 0;
    for (const std::string& line : split_lines(content)) {
        ++lineno;
        std::smatch m;
        if (!std::regex_match(line, m, re)) continue;
        PortManifest pm;
        pm.port = m[1].str();
        pm.provides = m[2].str() == "provides";
        pm.line = lineno;
        std::string rest = m[3].str();
        size_t pos = 0;
        while (pos < rest.size()) {
            size_t comma = rest.find(", ", pos);
            pm.labels.push_back(rest.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 2;
        }
        out.push_back(pm);
    }
    return out;
}

// Splits `port` as `<peer>_TO_<self>` (provides) or `<self>_TO_<peer>`
// (requires); returns the peer component index or -1.
int port_peer(const Architecture& arch, const std::string& port, const std::string& self,
              bool provides) {
    for (size_t i = 0; i < arch.components.size(); ++i) {
        const std::string& other = arch.components[i].name;
        std::string expect = provides ? other + "_TO_" + self : self + "_TO_" + other;
        if (port == expect) return static_cast<int>(i);
    }
    return -1;
}

bool channel_backed(const Architecture& arch, int src, int dst) {
    for (const Channel& ch : arch.channels)
        if (ch.source == src && ch.target == dst) return true;
    return false;
}

}  // namespace

IntegrityReport check_generated_integrity(const GeneratedFileSet& files, const Architecture& arch,
                                          const TemplateSet& templates) {
    IntegrityReport report;
    auto err = [&report](const std::string& file, int line, const std::string& msg) {
        report.findings.push_back({Severity::Error, {line, 1}, file + ": " + msg});
    };

    std::map<std::string, std::vector<PortManifest>> manifests;  // component name -> ports
    for (const Component& comp : arch.components) {
        std::string name = comp.name + "." + templates.component_ext;
        const GeneratedFile* f = files.find(name);
        if (f == nullptr) {
            err(name, 0, "missing generated component file");
            continue;
        }
        manifests[comp.name] = parse_manifests(f->content);
    }

    auto provides_labels = [&](const std::string& comp,
                               const std::string& port) -> const std::vector<std::string>* {
        auto it = manifests.find(comp);
        if (it == manifests.end()) return nullptr;
        for (const PortManifest& pm : it->second)
            if (pm.provides && pm.port == port) return &pm.labels;
        return nullptr;
    };

    for (const Component& comp : arch.components) {
        std::string fname = comp.name + "." + templates.component_ext;
        auto it = manifests.find(comp.name);
        if (it == manifests.end()) continue;
        for (const PortManifest& pm : it->second) {
            int peer = port_peer(arch, pm.port, comp.name, pm.provides);
            if (peer < 0) {
                err(fname, pm.line, "port '" + pm.port + "' does not name this component and a peer");
                continue;
            }
            int src = pm.provides ? peer : arch.component_index(comp.name);
            int dst = pm.provides ? arch.component_index(comp.name) : peer;
            if (!channel_backed(arch, src, dst))
                err(fname, pm.line,
                    "port '" + pm.port + "' has no declared channel behind it");
            if (!pm.provides) {
                const std::vector<std::string>* peer_labels =
                    provides_labels(arch.components[static_cast<size_t>(peer)].name, pm.port);
                for (const std::string& label : pm.labels)
                    if (peer_labels == nullptr ||
                        std::find(peer_labels->begin(), peer_labels->end(), label) ==
                            peer_labels->end())
                        err(fname, pm.line,
                            "required message '" + label + "' on port '" + pm.port +
                                "' has no matching provides on '" +
                                arch.components[static_cast<size_t>(peer)].name + "'");
            } else {
                // (c) Each provided method must fire both machines before
                // its user region.
                const GeneratedFile* f = files.find(fname);
                std::vector<std::string> lines = split_lines(f->content);
                const std::string& peer_name = arch.components[static_cast<size_t>(peer)].name;
                for (const std::string& label : pm.labels) {
                    std::string intro = "void " + label + "() {";
                    size_t i = 0;
                    while (i < lines.size() && trimmed(lines[i]) != intro) ++i;
                    if (i == lines.size()) {
                        err(fname, pm.line, "provided method '" + label + "' is not defined");
                        continue;
                    }
                    std::string recv_fire = "behaviour_" + comp.name + "->transFire(behaviour_" +
                                            comp.name + "->T_" + label + ");";
                    std::string send_fire = "behaviour_" + peer_name + "->transFire(behaviour_" +
                                            peer_name + "->T_" + label + ");";
                    int stage = 0;
                    for (size_t j = i + 1; j < lines.size(); ++j) {
                        std::string t = trimmed(lines[j]);
                        if (t == kRegionBegin || t == "}") break;
                        if (stage == 0 && t == recv_fire) stage = 1;
                        else if (stage == 1 && t == send_fire) stage = 2;
                    }
                    if (stage != 2)
                        err(fname, static_cast<int>(i + 1),
                            "provided method '" + label +
                                "' must fire the receiver's then the sender's transition before "
                                "its user region");
                }
            }
        }
    }

    // (b) MAIN may connect only channel-backed pairs, port and labels included.
    std::string main_name = "MAIN." + templates.main_ext;
    if (const GeneratedFile* f = files.find(main_name)) {
        static const std::regex wiring(
            "^\\s*c_(\\w+)\\.(\\w+)\\.(\\w+) = \\[&\\] \\{ c_(\\w+)\\.(\\w+)\\(\\); \\};$");
        int lineno = 0;
        for (const std::string& line : split_lines(f->content)) {
            ++lineno;
            std::smatch m;
            if (!std::regex_match(line, m, wiring)) continue;
            std::string src = m[1].str(), port = m[2].str(), label = m[3].str();
            std::string dst = m[4].str(), called = m[5].str();
            if (label != called) {
                err(main_name, lineno, "wiring binds '" + label + "' to '" + called + "'");
                continue;
            }
            int si = arch.component_index(src);
            int di = arch.component_index(dst);
            if (si < 0 || di < 0 || !channel_backed(arch, si, di)) {
                err(main_name, lineno,
                    "connection " + src + " -> " + dst + " has no declared channel behind it");
                continue;
            }
            if (port != src + "_TO_" + dst) {
                err(main_name, lineno, "port '" + port + "' does not match " + src + " -> " + dst);
                continue;
            }
            const std::vector<std::string>* labels = provides_labels(dst, port);
            if (labels == nullptr ||
                std::find(labels->begin(), labels->end(), label) == labels->end())
                err(main_name, lineno,
                    "wired message '" + label + "' is not provided by '" + dst + "'");
        }
    } else {
        err(main_name, 0, "missing generated MAIN file");
    }

    return report;
}

TemplateSet load_templates(const std::string& dir) {
    TemplateSet t = default_templates();
    t.component = read_text_file((fs::path(dir) / "component.tpl").string());
    t.state_machine = read_text_file((fs::path(dir) / "state_machine.tpl").string());
    t.main = read_text_file((fs::path(dir) / "main.tpl").string());

    fs::path settings = fs::path(dir) / "settings.json";
    if (fs::exists(settings)) {
        json s;
        try {
            s = json::parse(read_text_file(settings.string()));
        } catch (const json::exception& e) {
            throw CodegenError(settings.string() + ": " + e.what());
        }
        if (s.contains("component_ext")) t.component_ext = s["component_ext"].get<std::string>();
        if (s.contains("state_machine_ext"))
            t.state_machine_ext = s["state_machine_ext"].get<std::string>();
        if (s.contains("main_ext")) t.main_ext = s["main_ext"].get<std::string>();
        if (s.contains("region_anchors")) {
            t.region_anchors.clear();
            for (const json& a : s["region_anchors"])
                t.region_anchors.push_back(
                    {a.at("pattern").get<std::string>(), a.at("label").get<std::string>()});
        }
    }
    return t;
}

}  // namespace archon
