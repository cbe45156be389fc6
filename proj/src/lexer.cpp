#include "lexer.hpp"

namespace archon {

namespace {

bool ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}

}  // namespace

Lexer::Lexer(const std::string& text) {
    int line = 1;
    int col = 1;
    size_t i = 0;
    const size_t n = text.size();
    auto advance = [&](size_t count) {
        for (size_t k = 0; k < count; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') advance(1);
            continue;
        }
        SourcePos pos{line, col};
        if (ident_start(c)) {
            size_t start = i;
            while (i < n && ident_char(text[i])) advance(1);
            tokens_.push_back({Tok::Ident, text.substr(start, i - start), pos});
            continue;
        }
        if (c == '-' && i + 1 < n && text[i + 1] == '>') {
            advance(2);
            tokens_.push_back({Tok::Arrow, "->", pos});
            continue;
        }
        switch (c) {
            case '{': tokens_.push_back({Tok::LBrace, "{", pos}); break;
            case '}': tokens_.push_back({Tok::RBrace, "}", pos}); break;
            case ';': tokens_.push_back({Tok::Semi, ";", pos}); break;
            case ':': tokens_.push_back({Tok::Colon, ":", pos}); break;
            case ',': tokens_.push_back({Tok::Comma, ",", pos}); break;
            case '*': tokens_.push_back({Tok::Star, "*", pos}); break;
            default:
                throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
        advance(1);
    }
    tokens_.push_back({Tok::End, "", {line, col}});
}

Token Lexer::next() {
    Token t = tokens_[cursor_];
    if (t.kind != Tok::End) ++cursor_;
    return t;
}

Token Lexer::expect(Tok kind, const std::string& expected) {
    if (peek().kind != kind) {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos, "expected " + expected + ", got " + got);
    }
    return next();
}

Token Lexer::expect_keyword(const std::string& word) {
    if (peek().kind != Tok::Ident || peek().text != word) {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos, "expected '" + word + "', got " + got);
    }
    return next();
}

bool Lexer::peek_keyword(const std::string& word) const {
    return peek().kind == Tok::Ident && peek().text == word;
}

std::string token_kind_name(Tok kind) {
    switch (kind) {
        case Tok::Ident: return "identifier";
        case Tok::Arrow: return "'->'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Comma: return "','";
        case Tok::Star: return "'*'";
        case Tok::End: return "end of input";
    }
    return "?";
}

}  // namespace archon
