#include "archon/adl_parser.hpp"

#include <map>

#include "lexer.hpp"

namespace archon {

namespace {

// Transition lines look like:  a -> b : send m on ch ;
void parse_transition(Lexer& lex, const Architecture& arch, StateMachine& m) {
    Token from = lex.expect(Tok::Ident, "state name");
    lex.expect(Tok::Arrow, "'->'");
    Token to = lex.expect(Tok::Ident, "state name");
    lex.expect(Tok::Colon, "':'");
    Token dir = lex.expect(Tok::Ident, "'send' or 'recv'");
    if (dir.text != "send" && dir.text != "recv")
        throw ParseError(dir.pos, "expected 'send' or 'recv', got '" + dir.text + "'");
    Token label = lex.expect(Tok::Ident, "message label");
    lex.expect_keyword("on");
    Token chan = lex.expect(Tok::Ident, "channel name");
    lex.expect(Tok::Semi, "';'");

    Transition t;
    t.from = m.state_index(from.text);
    if (t.from < 0) throw ParseError(from.pos, "reference to undeclared state '" + from.text + "'");
    t.to = m.state_index(to.text);
    if (t.to < 0) throw ParseError(to.pos, "reference to undeclared state '" + to.text + "'");
    t.label = label.text;
    t.dir = dir.text == "send" ? Direction::Send : Direction::Receive;
    t.channel = arch.channel_index(chan.text);
    if (t.channel < 0)
        throw ParseError(chan.pos, "reference to undeclared channel '" + chan.text + "'");
    t.pos = from.pos;
    m.transitions.push_back(t);
}

StateMachine parse_machine(Lexer& lex, const Architecture& arch, SourcePos pos, int owner) {
    StateMachine m;
    m.owner = owner;
    m.pos = pos;
    lex.expect(Tok::LBrace, "'{'");

    std::string initial_name;
    SourcePos initial_pos{};
    while (lex.peek().kind != Tok::RBrace) {
        if (lex.peek_keyword("initial")) {
            Token kw = lex.next();
            if (!initial_name.empty())
                throw ParseError(kw.pos, "duplicate 'initial' declaration");
            Token name = lex.expect(Tok::Ident, "state name");
            initial_name = name.text;
            initial_pos = name.pos;
            lex.expect(Tok::Semi, "';'");
        } else if (lex.peek_keyword("state")) {
            lex.next();
            Token name = lex.expect(Tok::Ident, "state name");
            if (m.state_index(name.text) >= 0)
                throw ParseError(name.pos, "duplicate identifier '" + name.text + "'");
            State s;
            s.name = name.text;
            s.pos = name.pos;
            if (lex.peek_keyword("final")) {
                lex.next();
                s.is_final = true;
            }
            lex.expect(Tok::Semi, "';'");
            m.states.push_back(s);
        } else if (lex.peek().kind == Tok::Ident) {
            parse_transition(lex, arch, m);
        } else {
            throw ParseError(lex.peek().pos,
                             "expected 'initial', 'state', a transition, or '}', got " +
                                 token_kind_name(lex.peek().kind));
        }
    }
    lex.expect(Tok::RBrace, "'}'");

    if (initial_name.empty())
        throw ParseError(pos, "machine is missing an 'initial' declaration");
    m.initial = m.state_index(initial_name);
    if (m.initial < 0)
        throw ParseError(initial_pos, "reference to undeclared state '" + initial_name + "'");
    return m;
}

}  // namespace

Architecture parse_architecture(const std::string& text) {
    Lexer lex(text);
    Architecture arch;

    lex.expect_keyword("architecture");
    arch.name = lex.expect(Tok::Ident, "architecture name").text;
    lex.expect(Tok::LBrace, "'{'");

    std::map<std::string, SourcePos> seen;
    auto declare = [&](const Token& name) {
        auto [it, inserted] = seen.emplace(name.text, name.pos);
        (void)it;
        if (!inserted)
            throw ParseError(name.pos, "duplicate identifier '" + name.text + "'");
    };

    std::vector<bool> has_machine;
    while (lex.peek().kind != Tok::RBrace) {
        if (lex.peek_keyword("component")) {
            lex.next();
            Token name = lex.expect(Tok::Ident, "component name");
            declare(name);
            lex.expect(Tok::Semi, "';'");
            arch.components.push_back({name.text, name.pos});
            has_machine.push_back(false);
        } else if (lex.peek_keyword("channel")) {
            lex.next();
            Token name = lex.expect(Tok::Ident, "channel name");
            declare(name);
            lex.expect_keyword("from");
            Token src = lex.expect(Tok::Ident, "component name");
            lex.expect_keyword("to");
            Token dst = lex.expect(Tok::Ident, "component name");
            lex.expect(Tok::Semi, "';'");
            Channel ch;
            ch.name = name.text;
            ch.pos = name.pos;
            ch.source = arch.component_index(src.text);
            if (ch.source < 0)
                throw ParseError(src.pos, "reference to undeclared component '" + src.text + "'");
            ch.target = arch.component_index(dst.text);
            if (ch.target < 0)
                throw ParseError(dst.pos, "reference to undeclared component '" + dst.text + "'");
            if (ch.source == ch.target)
                throw ParseError(name.pos,
                                 "channel '" + name.text + "' must connect two distinct components");
            arch.channels.push_back(ch);
        } else if (lex.peek_keyword("statemachine")) {
            Token kw = lex.next();
            Token owner = lex.expect(Tok::Ident, "component name");
            int idx = arch.component_index(owner.text);
            if (idx < 0)
                throw ParseError(owner.pos,
                                 "reference to undeclared component '" + owner.text + "'");
            if (has_machine[idx])
                throw ParseError(owner.pos,
                                 "component '" + owner.text + "' already has a state machine");
            has_machine[idx] = true;
            arch.machines.push_back(parse_machine(lex, arch, kw.pos, idx));
        } else {
            throw ParseError(lex.peek().pos,
                             "expected 'component', 'channel', 'statemachine', or '}', got " +
                                 token_kind_name(lex.peek().kind));
        }
    }
    lex.expect(Tok::RBrace, "'}'");
    if (!lex.at_end())
        throw ParseError(lex.peek().pos, "unexpected input after architecture body");

    if (arch.components.empty())
        throw ParseError({1, 1}, "architecture must declare at least one component");
    for (size_t c = 0; c < arch.components.size(); ++c)
        if (!has_machine[c])
            throw ParseError(arch.components[c].pos, "component '" + arch.components[c].name +
                                                         "' has no state machine");
    return arch;
}

}  // namespace archon
