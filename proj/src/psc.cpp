#include "archon/psc.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace archon {

bool PscProperty::is_fail() const {
    return !messages.empty() && messages.back().kind == PscKind::Fail;
}

std::vector<PscMessage> PscProperty::precondition() const {
    std::vector<PscMessage> out;
    for (const auto& m : messages)
        if (m.kind == PscKind::Regular) out.push_back(m);
    return out;
}

std::vector<PscMessage> PscProperty::continuation() const {
    std::vector<PscMessage> out;
    for (const auto& m : messages)
        if (m.kind != PscKind::Regular) out.push_back(m);
    return out;
}

bool operator==(const PscEvent& a, const PscEvent& b) {
    return a.label == b.label && a.from == b.from && a.to == b.to;
}

bool operator==(const UnwantedSet& a, const UnwantedSet& b) {
    return a.wildcard == b.wildcard && a.messages == b.messages;
}

bool operator==(const PscMessage& a, const PscMessage& b) {
    return a.kind == b.kind && a.event == b.event && a.unwanted == b.unwanted;
}

bool operator==(const PscProperty& a, const PscProperty& b) {
    return a.name == b.name && a.messages == b.messages;
}

namespace {

PscEvent parse_event(Lexer& lex) {
    PscEvent ev;
    Token label = lex.expect(Tok::Ident, "message label");
    ev.label = label.text;
    ev.pos = label.pos;
    lex.expect_keyword("from");
    ev.from = lex.expect(Tok::Ident, "component name").text;
    lex.expect_keyword("to");
    ev.to = lex.expect(Tok::Ident, "component name").text;
    return ev;
}

PscMessage parse_message(Lexer& lex) {
    Token kind_tok = lex.expect(Tok::Ident, "'e', 'r', or 'f'");
    PscMessage msg;
    if (kind_tok.text == "e")
        msg.kind = PscKind::Regular;
    else if (kind_tok.text == "r")
        msg.kind = PscKind::Required;
    else if (kind_tok.text == "f")
        msg.kind = PscKind::Fail;
    else
        throw ParseError(kind_tok.pos, "expected 'e', 'r', or 'f', got '" + kind_tok.text + "'");
    lex.expect(Tok::Colon, "':'");
    msg.event = parse_event(lex);

    if (lex.peek_keyword("unwanted")) {
        lex.next();
        lex.expect(Tok::LBrace, "'{'");
        if (lex.peek().kind == Tok::Star) {
            lex.next();
            msg.unwanted.wildcard = true;
        } else {
            msg.unwanted.messages.push_back(parse_event(lex));
            while (lex.peek().kind == Tok::Comma) {
                lex.next();
                msg.unwanted.messages.push_back(parse_event(lex));
            }
        }
        lex.expect(Tok::RBrace, "'}'");
    }
    lex.expect(Tok::Semi, "';'");
    return msg;
}

void check_shape(const PscProperty& prop) {
    bool saw_required = false;
    bool saw_fail = false;
    for (const auto& m : prop.messages) {
        if (saw_fail)
            throw ParseError(m.event.pos,
                             "property '" + prop.name + "': no message may follow a fail (f:) message");
        switch (m.kind) {
            case PscKind::Regular:
                if (saw_required)
                    throw ParseError(m.event.pos, "property '" + prop.name +
                                                      "': regular (e:) message cannot follow a "
                                                      "required (r:) message");
                break;
            case PscKind::Required:
                saw_required = true;
                break;
            case PscKind::Fail:
                if (saw_required)
                    throw ParseError(m.event.pos, "property '" + prop.name +
                                                      "': required and fail messages cannot be mixed");
                saw_fail = true;
                break;
        }
    }
    if (!saw_required && !saw_fail)
        throw ParseError(prop.pos, "property '" + prop.name +
                                       "' must end with a required (r:) or fail (f:) message");
}

}  // namespace

std::vector<PscProperty> parse_properties(const std::string& text) {
    Lexer lex(text);
    std::vector<PscProperty> props;
    std::set<std::string> names;
    while (!lex.at_end()) {
        Token kw = lex.expect_keyword("property");
        PscProperty prop;
        Token name = lex.expect(Tok::Ident, "property name");
        prop.name = name.text;
        prop.pos = kw.pos;
        if (!names.insert(prop.name).second)
            throw ParseError(name.pos, "duplicate identifier '" + prop.name + "'");
        lex.expect(Tok::LBrace, "'{'");
        while (lex.peek().kind != Tok::RBrace) prop.messages.push_back(parse_message(lex));
        lex.expect(Tok::RBrace, "'}'");
        check_shape(prop);
        props.push_back(std::move(prop));
    }
    if (props.empty()) throw ParseError({1, 1}, "expected at least one property");
    return props;
}

std::string pretty_print(const std::vector<PscProperty>& props) {
    std::ostringstream out;
    for (const auto& prop : props) {
        out << "property " << prop.name << " {\n";
        for (const auto& m : prop.messages) {
            const char* kind = m.kind == PscKind::Regular ? "e" : m.kind == PscKind::Required ? "r" : "f";
            out << "  " << kind << ": " << m.event.label << " from " << m.event.from << " to "
                << m.event.to;
            if (!m.unwanted.empty()) {
                out << " unwanted { ";
                if (m.unwanted.wildcard) {
                    out << "*";
                } else {
                    for (size_t i = 0; i < m.unwanted.messages.size(); ++i) {
                        if (i) out << ", ";
                        const auto& u = m.unwanted.messages[i];
                        out << u.label << " from " << u.from << " to " << u.to;
                    }
                }
                out << " }";
            }
            out << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

namespace {

const char* kSentenceTexts[5] = {
    "If the message <m> is exchanged then ...",
    "If the message <m> is exchanged and between this message and its predecessor (or the "
    "system startup) no other messages can be exchanged then ...",
    "If the message <m> is exchanged and between this message and its predecessor (or the "
    "system startup) the messages contained in <set> cannot be exchanged then ...",
    "If the message <m> is exchanged and between this message and its successor no other "
    "messages can be exchanged then ...",
    "If the message <m> is exchanged and between this message and its successor the messages "
    "contained in <set> cannot be exchanged then ...",
};

}  // namespace

std::vector<SentencePattern> sentence_patterns() {
    std::vector<SentencePattern> out;
    for (Panel panel : {Panel::Mandatory, Panel::Forbidden, Panel::Optional})
        for (int i = 0; i < 5; ++i)
            out.push_back({"S" + std::to_string(i + 1), panel, kSentenceTexts[i]});
    return out;
}

InstantiatedSentence instantiate_sentence(const std::string& id, const PscMessage& stub,
                                          const std::optional<UnwantedSet>& constraint) {
    int n = 0;
    if (id.size() == 2 && id[0] == 'S' && id[1] >= '1' && id[1] <= '5') n = id[1] - '0';
    if (n == 0) throw Error("unknown sentence id '" + id + "'");

    const bool has_hole = n == 3 || n == 5;
    if (has_hole && !constraint)
        throw Error("sentence " + id + " requires a message-set constraint");
    if (!has_hole && constraint)
        throw Error("sentence " + id + " does not take a message-set constraint");

    InstantiatedSentence out;
    out.message = stub;
    out.message.unwanted = UnwantedSet{};
    switch (n) {
        case 1:
            break;
        case 2:
            out.message.unwanted.wildcard = true;
            break;
        case 3:
            out.message.unwanted = *constraint;
            break;
        case 4: {
            UnwantedSet wild;
            wild.wildcard = true;
            out.successor_constraint = wild;
            break;
        }
        case 5:
            out.successor_constraint = *constraint;
            break;
    }
    return out;
}

namespace {

// Labels exchangeable on a channel: sent by the source machine and received
// by the target machine on it.
std::vector<std::string> usable_labels(const Architecture& arch, int channel) {
    const Channel& ch = arch.channels[channel];
    const StateMachine* sm = arch.machine_for(ch.source);
    const StateMachine* rm = arch.machine_for(ch.target);
    std::vector<std::string> out;
    if (!sm || !rm) return out;
    for (const auto& t : sm->transitions) {
        if (t.channel != channel || t.dir != Direction::Send) continue;
        bool received = false;
        for (const auto& r : rm->transitions)
            if (r.channel == channel && r.dir == Direction::Receive && r.label == t.label) {
                received = true;
                break;
            }
        if (received && std::find(out.begin(), out.end(), t.label) == out.end())
            out.push_back(t.label);
    }
    return out;
}

}  // namespace

BindResult bind(const PscProperty& prop, const Architecture& arch) {
    BindResult result;
    result.property.name = prop.name;
    result.property.fail_kind = prop.is_fail();

    auto resolve = [&](const PscEvent& ev) -> MsgRef {
        int from = arch.component_index(ev.from);
        if (from < 0)
            throw BindError("property '" + prop.name + "': unknown component '" + ev.from + "'");
        int to = arch.component_index(ev.to);
        if (to < 0)
            throw BindError("property '" + prop.name + "': unknown component '" + ev.to + "'");

        std::vector<int> candidates;
        for (size_t i = 0; i < arch.channels.size(); ++i)
            if (arch.channels[i].source == from && arch.channels[i].target == to)
                candidates.push_back(static_cast<int>(i));
        if (candidates.empty())
            throw BindError("property '" + prop.name + "': no channel from '" + ev.from +
                            "' to '" + ev.to + "'");

        std::vector<int> used;
        for (int c : candidates) {
            auto labels = usable_labels(arch, c);
            if (std::find(labels.begin(), labels.end(), ev.label) != labels.end()) used.push_back(c);
        }
        if (used.size() > 1)
            throw BindError("property '" + prop.name + "': message '" + ev.label +
                            "' is exchanged on more than one channel from '" + ev.from + "' to '" +
                            ev.to + "'");
        if (used.empty()) {
            result.warnings.push_back(
                {Severity::Warning, ev.pos,
                 "property '" + prop.name + "': message '" + ev.label + "' from '" + ev.from +
                     "' to '" + ev.to + "' is never exchanged"});
            return {ev.label, candidates.front()};
        }
        return {ev.label, used.front()};
    };

    auto resolve_unwanted = [&](const UnwantedSet& set, const MsgRef& expected) {
        std::vector<MsgRef> out;
        auto add = [&](const MsgRef& m) {
            if (m == expected) return;
            if (std::find(out.begin(), out.end(), m) == std::end(out)) out.push_back(m);
        };
        if (set.wildcard) {
            for (size_t c = 0; c < arch.channels.size(); ++c)
                for (const auto& label : usable_labels(arch, static_cast<int>(c)))
                    add({label, static_cast<int>(c)});
        } else {
            for (const auto& ev : set.messages) add(resolve(ev));
        }
        return out;
    };

    for (const auto& m : prop.messages) {
        BoundMessage bm;
        bm.kind = m.kind;
        bm.msg = resolve(m.event);
        bm.unwanted = resolve_unwanted(m.unwanted, bm.msg);
        if (m.kind == PscKind::Regular)
            result.property.precondition.push_back(std::move(bm));
        else
            result.property.continuation.push_back(std::move(bm));
    }

    if (result.property.fail_kind && !result.property.precondition.empty() &&
        result.property.continuation.front().msg == result.property.precondition.front().msg)
        throw BindError("property '" + prop.name +
                        "': fail message must differ from the first precondition message");

    sort_findings(result.warnings);
    return result;
}

}  // namespace archon
