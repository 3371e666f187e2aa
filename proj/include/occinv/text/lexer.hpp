#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "occinv/error.hpp"

namespace occinv::text {

enum class TokenKind { Ident, Number, Symbol, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;

    bool is(std::string_view symbol) const { return kind == TokenKind::Symbol && text == symbol; }
    bool is_keyword(std::string_view word) const { return kind == TokenKind::Ident && text == word; }
};

/// Splits source text into identifiers, numbers (integers or decimals) and
/// operator symbols. `//` and `#` start comments running to end of line.
inline std::vector<Token> tokenize(std::string_view src)
{
    static const char* const twoChar[] = {":=", "+=", "--", "<=", ">=", "!=", "&&", "||", "=="};
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        unsigned char ch = static_cast<unsigned char>(src[i]);
        if (std::isspace(ch)) {
            advance(1);
            continue;
        }
        if (ch == '#' || (ch == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.col = col;
        std::size_t j = i;
        if (std::isalpha(ch) || ch == '_' || ch == '$') {
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$'))
                ++j;
            tok.kind = TokenKind::Ident;
        } else if (std::isdigit(ch)) {
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                    ++j;
            }
            tok.kind = TokenKind::Number;
        } else {
            tok.kind = TokenKind::Symbol;
            j = i + 1;
            for (const char* sym : twoChar)
                if (src.substr(i, 2) == sym) {
                    j = i + 2;
                    break;
                }
            static const std::string_view single = "+-*/^()[]{};,<>=!%";
            if (j == i + 1 && single.find(static_cast<char>(ch)) == std::string_view::npos)
                throw SyntaxError(line, col, "a valid character (found '" + std::string(1, static_cast<char>(ch)) + "')");
        }
        tok.text = std::string(src.substr(i, j - i));
        advance(j - i);
        out.push_back(std::move(tok));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
    explicit TokenStream(std::string_view src) : tokens_(tokenize(src)) {}

    const Token& peek(std::size_t ahead = 0) const
    {
        std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[k];
    }
    const Token& next()
    {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size())
            ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokenKind::End; }

    bool accept(std::string_view symbol)
    {
        if (peek().is(symbol)) {
            next();
            return true;
        }
        return false;
    }
    bool accept_keyword(std::string_view word)
    {
        if (peek().is_keyword(word)) {
            next();
            return true;
        }
        return false;
    }
    const Token& expect(std::string_view symbol)
    {
        if (!peek().is(symbol))
            fail("'" + std::string(symbol) + "'");
        return next();
    }
    const Token& expect_keyword(std::string_view word)
    {
        if (!peek().is_keyword(word))
            fail("'" + std::string(word) + "'");
        return next();
    }
    const Token& expect_kind(TokenKind kind, const std::string& what)
    {
        if (peek().kind != kind)
            fail(what);
        return next();
    }

    [[noreturn]] void fail(const std::string& expected) const
    {
        const Token& t = peek();
        std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.line, t.col, expected + " (found " + found + ")");
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace occinv::text
