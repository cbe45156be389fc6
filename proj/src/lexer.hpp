#pragma once

#include <string>
#include <vector>

#include "archon/diag.hpp"

namespace archon {

enum class Tok {
    Ident,
    Arrow,   // ->
    LBrace,
    RBrace,
    Semi,
    Colon,
    Comma,
    Star,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

// Shared lexer for the architecture and property grammars. Whitespace is
// insignificant; // starts a comment running to end of line.
class Lexer {
public:
    explicit Lexer(const std::string& text);

    const Token& peek() const { return tokens_[cursor_]; }
    Token next();
    bool at_end() const { return peek().kind == Tok::End; }

    // Consumes a token of the given kind or throws ParseError naming the
    // expected token.
    Token expect(Tok kind, const std::string& expected);
    // Consumes an identifier with exactly the given text.
    Token expect_keyword(const std::string& word);
    bool peek_keyword(const std::string& word) const;

private:
    std::vector<Token> tokens_;
    size_t cursor_ = 0;
};

std::string token_kind_name(Tok kind);

}  // namespace archon
