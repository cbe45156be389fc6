#include "archon/template_engine.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace archon {

namespace {

using nlohmann::json;

struct Node {
    enum Kind { Text, Var, Section } kind = Text;
    std::string text;        // Text: literal bytes; Var/Section: the name
    bool inverted = false;   // Section only
    std::vector<Node> children;
};

struct Tag {
    char sigil = 0;  // 0 plain, '#', '^', '/'
    std::string name;
    size_t begin = 0;  // offset of "{{"
    size_t end = 0;    // offset one past "}}"
};

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return true;
}

// A section tag whose line holds nothing else swallows that whole line.
void trim_standalone(const std::string& tpl, Tag& tag) {
    size_t b = tag.begin;
    while (b > 0 && (tpl[b - 1] == ' ' || tpl[b - 1] == '\t')) --b;
    if (b != 0 && tpl[b - 1] != '\n') return;
    size_t e = tag.end;
    while (e < tpl.size() && (tpl[e] == ' ' || tpl[e] == '\t')) ++e;
    if (e < tpl.size() && tpl[e] == '\r') ++e;
    if (e == tpl.size()) {
        tag.begin = b;
        tag.end = e;
    } else if (tpl[e] == '\n') {
        tag.begin = b;
        tag.end = e + 1;
    }
}

std::vector<Node> parse(const std::string& tpl) {
    std::vector<Node> root;
    std::vector<Node*> stack;  // open sections
    auto* out = &root;

    size_t pos = 0;
    while (pos < tpl.size()) {
        size_t open = tpl.find("{{", pos);
        if (open == std::string::npos) {
            if (pos < tpl.size()) out->push_back({Node::Text, tpl.substr(pos), false, {}});
            break;
        }
        size_t close = tpl.find("}}", open + 2);
        if (close == std::string::npos) throw TemplateError("unterminated '{{' tag");

        Tag tag;
        tag.begin = open;
        tag.end = close + 2;
        std::string body = tpl.substr(open + 2, close - open - 2);
        if (!body.empty() && (body[0] == '#' || body[0] == '^' || body[0] == '/')) {
            tag.sigil = body[0];
            body.erase(0, 1);
        }
        tag.name = body;
        if (!valid_name(tag.name)) throw TemplateError("malformed tag '{{" + body + "}}'");
        if (tag.sigil != 0) trim_standalone(tpl, tag);

        if (tag.begin > pos) out->push_back({Node::Text, tpl.substr(pos, tag.begin - pos), false, {}});
        pos = tag.end;

        switch (tag.sigil) {
            case 0:
                out->push_back({Node::Var, tag.name, false, {}});
                break;
            case '#':
            case '^':
                out->push_back({Node::Section, tag.name, tag.sigil == '^', {}});
                stack.push_back(&out->back());
                out = &out->back().children;
                break;
            case '/':
                if (stack.empty() || stack.back()->text != tag.name)
                    throw TemplateError("unmatched '{{/" + tag.name + "}}'");
                stack.pop_back();
                out = stack.empty() ? &root : &stack.back()->children;
                break;
        }
    }
    if (!stack.empty()) throw TemplateError("unclosed '{{#" + stack.back()->text + "}}'");
    return root;
}

const json* lookup(const std::vector<const json*>& scopes, const std::string& path) {
    size_t dot = path.find('.');
    std::string head = path.substr(0, dot);
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        const json* v = *it;
        if (!v->is_object() || !v->contains(head)) continue;
        v = &(*v)[head];
        std::string rest = dot == std::string::npos ? "" : path.substr(dot + 1);
        while (!rest.empty()) {
            dot = rest.find('.');
            head = rest.substr(0, dot);
            if (!v->is_object() || !v->contains(head)) return nullptr;
            v = &(*v)[head];
            rest = dot == std::string::npos ? "" : rest.substr(dot + 1);
        }
        return v;
    }
    return nullptr;
}

bool truthy(const json* v) {
    if (v == nullptr || v->is_null()) return false;
    if (v->is_boolean()) return v->get<bool>();
    if (v->is_array()) return !v->empty();
    if (v->is_string()) return !v->get<std::string>().empty();
    return true;
}

std::string scalar_text(const json& v, const std::string& name) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    if (v.is_null()) return "";
    throw TemplateError("'" + name + "' is not a printable value");
}

void render_nodes(const std::vector<Node>& nodes, std::vector<const json*>& scopes,
                  std::ostringstream& out) {
    for (const Node& n : nodes) {
        switch (n.kind) {
            case Node::Text:
                out << n.text;
                break;
            case Node::Var: {
                const json* v = lookup(scopes, n.text);
                if (v != nullptr) out << scalar_text(*v, n.text);
                break;
            }
            case Node::Section: {
                const json* v = lookup(scopes, n.text);
                if (n.inverted) {
                    if (!truthy(v)) render_nodes(n.children, scopes, out);
                    break;
                }
                if (!truthy(v)) break;
                if (v->is_array()) {
                    for (const json& item : *v) {
                        scopes.push_back(&item);
                        render_nodes(n.children, scopes, out);
                        scopes.pop_back();
                    }
                } else {
                    scopes.push_back(v);
                    render_nodes(n.children, scopes, out);
                    scopes.pop_back();
                }
                break;
            }
        }
    }
}

}  // namespace

std::string render_template(const std::string& tpl, const nlohmann::json& context) {
    std::vector<Node> nodes = parse(tpl);
    std::ostringstream out;
    std::vector<const json*> scopes{&context};
    render_nodes(nodes, scopes, out);
    return out.str();
}

}  // namespace archon
