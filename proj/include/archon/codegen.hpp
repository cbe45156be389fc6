#pragma once

#include <optional>
#include <string>
#include <vector>

#include "archon/diag.hpp"
#include "archon/model.hpp"

namespace archon {

enum class PortDir { Provides, Requires };

struct PortMethod {
    std::string label;
    int channel = -1;
};

// One directed port between two components. Both endpoints of a message flow
// use the same port name, `<Sender>_TO_<Receiver>`: the sender declares it as
// a requires port, the receiver as a provides port.
struct Port {
    std::string name;
    int peer = -1;  // component index
    PortDir dir = PortDir::Provides;
    std::vector<PortMethod> methods;
};

struct PortPlan {
    // Parallel to Architecture::components. Per component: provides ports
    // first, then requires ports, each group ordered by the first declared
    // channel of the connected pair.
    std::vector<std::vector<Port>> by_component;
};

// A port method exists for each message that both endpoints implement (the
// source machine sends it on the channel and the target machine receives
// it). Methods are listed in the order the source machine first sends them.
PortPlan plan_ports(const Architecture& arch);

struct SMEntry {
    int t = -1;       // transition constant
    int target = -1;  // state constant
    int flag = 0;     // 0 = send, 1 = receive
};

// Integer encoding of one state machine: states numbered in declaration
// order, transition labels numbered by first use, and per-state adjacency
// rows in declaration order.
struct SMEncoding {
    std::vector<std::string> state_names;
    std::vector<std::string> transition_labels;
    int initial = 0;
    std::vector<std::vector<SMEntry>> rows;

    int state_const(const std::string& name) const;
    int transition_const(const std::string& label) const;
};

SMEncoding encode_state_machine(const StateMachine& m);

// Target state when row(current) admits t; ProtocolViolation otherwise.
int trans_fire(const SMEncoding& enc, int current, int t);
std::optional<int> try_fire(const SMEncoding& enc, int current, int t);

// Matches a line that introduces a user-region scope. `label` is either a
// literal or "$1" for the pattern's first capture group.
struct RegionAnchor {
    std::string pattern;
    std::string label;
};

struct TemplateSet {
    std::string component;
    std::string state_machine;
    std::string main;
    std::string component_ext = "hpp";
    std::string state_machine_ext = "hpp";
    std::string main_ext = "cpp";
    std::vector<RegionAnchor> region_anchors;
};

TemplateSet default_templates();

// Reads component.tpl, state_machine.tpl, main.tpl and settings.json.
TemplateSet load_templates(const std::string& dir);

struct GeneratedFile {
    std::string name;
    std::string content;
};

struct GeneratedFileSet {
    std::vector<GeneratedFile> files;

    const GeneratedFile* find(const std::string& name) const;
};

// Pure: one file per component, one SM_<Name> file per component, MAIN, and
// an empty ORPHANED.txt. Throws CodegenError when the architecture cannot be
// rendered unambiguously (duplicate method names on one component, generated
// identifier collisions).
GeneratedFileSet render(const Architecture& arch, const TemplateSet& templates);

// render + write_files.
GeneratedFileSet render(const Architecture& arch, const TemplateSet& templates,
                        const std::string& out_dir);

void write_files(const GeneratedFileSet& set, const std::string& dir);

// Reads back every file in `dir` that follows the set's naming scheme
// (matching extension or ORPHANED.txt).
GeneratedFileSet read_files(const std::string& dir, const TemplateSet& templates);

struct UserRegion {
    std::string label;    // nearest preceding anchor
    std::string content;  // verbatim lines between the markers
};

// Regions of one file in order of appearance. Throws CodegenError on
// unbalanced markers, a region before any anchor, or two regions under the
// same label.
std::vector<UserRegion> extract_user_regions(const TemplateSet& templates,
                                             const std::string& file_name,
                                             const std::string& content);

// Fresh output with every region's content replaced by the previous content
// under the same (file, label) key. Previous regions whose key is gone are
// appended to ORPHANED.txt; previous ORPHANED.txt content is carried over.
GeneratedFileSet merge_user_regions(const GeneratedFileSet& previous,
                                    const GeneratedFileSet& fresh,
                                    const TemplateSet& templates);

using IntegrityReport = ValidationReport;

// Structural communication-integrity check over generated text: requires
// methods must match a provides declaration on the peer, MAIN may connect
// only channel-backed port pairs, and every provided method must fire both
// machine transitions before its user region.
IntegrityReport check_generated_integrity(const GeneratedFileSet& files, const Architecture& arch,
                                          const TemplateSet& templates);

}  // namespace archon
