#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "nnefx/errors.hpp"

namespace nnefx {

enum class TokenType {
  Identifier,
  Integer,
  Float,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Equals,
  Arrow,
  EndOfFile,
};

inline const char* token_type_name(TokenType t) {
  switch (t) {
    case TokenType::Identifier: return "identifier";
    case TokenType::Integer: return "integer";
    case TokenType::Float: return "float";
    case TokenType::String: return "string";
    case TokenType::LParen: return "'('";
    case TokenType::RParen: return "')'";
    case TokenType::LBracket: return "'['";
    case TokenType::RBracket: return "']'";
    case TokenType::LBrace: return "'{'";
    case TokenType::RBrace: return "'}'";
    case TokenType::Comma: return "','";
    case TokenType::Semicolon: return "';'";
    case TokenType::Equals: return "'='";
    case TokenType::Arrow: return "'->'";
    case TokenType::EndOfFile: return "end of input";
  }
  return "?";
}

struct Token {
  TokenType type;
  std::string text;  // identifier name, numeric text, or string contents
  int line;
  int column;
};

// '#' starts a comment running to end of line. Strings are single-quoted
// with no escape sequences. Numbers may carry one leading '-'.
inline std::vector<Token> tokenize(const std::string& source) {
  std::vector<Token> tokens;
  int line = 1, column = 1;
  size_t i = 0;
  const size_t n = source.size();

  auto push = [&](TokenType type, std::string text, int l, int c) {
    tokens.push_back(Token{type, std::move(text), l, c});
  };
  auto advance = [&]() {
    if (source[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };

  while (i < n) {
    char ch = source[i];
    if (ch == '#') {
      while (i < n && source[i] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance();
      continue;
    }
    int start_line = line, start_col = column;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string word;
      while (i < n && (std::isalnum(static_cast<unsigned char>(source[i])) || source[i] == '_')) {
        word += source[i];
        advance();
      }
      push(TokenType::Identifier, std::move(word), start_line, start_col);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
      std::string num;
      if (ch == '-') {
        num += '-';
        advance();
      }
      bool is_float = false;
      while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) {
        num += source[i];
        advance();
      }
      if (i < n && source[i] == '.') {
        is_float = true;
        num += '.';
        advance();
        if (i >= n || !std::isdigit(static_cast<unsigned char>(source[i])))
          throw SyntaxError(ErrorKind::LexError, "digit expected after '.'", line, column);
        while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) {
          num += source[i];
          advance();
        }
      }
      if (i < n && (source[i] == 'e' || source[i] == 'E')) {
        is_float = true;
        num += source[i];
        advance();
        if (i < n && (source[i] == '+' || source[i] == '-')) {
          num += source[i];
          advance();
        }
        if (i >= n || !std::isdigit(static_cast<unsigned char>(source[i])))
          throw SyntaxError(ErrorKind::LexError, "digit expected in exponent", line, column);
        while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) {
          num += source[i];
          advance();
        }
      }
      push(is_float ? TokenType::Float : TokenType::Integer, std::move(num), start_line, start_col);
      continue;
    }
    if (ch == '\'') {
      advance();
      std::string text;
      while (i < n && source[i] != '\'') {
        if (source[i] == '\n')
          throw SyntaxError(ErrorKind::LexError, "unterminated string", start_line, start_col);
        text += source[i];
        advance();
      }
      if (i >= n) throw SyntaxError(ErrorKind::LexError, "unterminated string", start_line, start_col);
      advance();  // closing quote
      push(TokenType::String, std::move(text), start_line, start_col);
      continue;
    }
    if (ch == '-' && i + 1 < n && source[i + 1] == '>') {
      advance();
      advance();
      push(TokenType::Arrow, "->", start_line, start_col);
      continue;
    }
    TokenType type;
    switch (ch) {
      case '(': type = TokenType::LParen; break;
      case ')': type = TokenType::RParen; break;
      case '[': type = TokenType::LBracket; break;
      case ']': type = TokenType::RBracket; break;
      case '{': type = TokenType::LBrace; break;
      case '}': type = TokenType::RBrace; break;
      case ',': type = TokenType::Comma; break;
      case ';': type = TokenType::Semicolon; break;
      case '=': type = TokenType::Equals; break;
      default:
        throw SyntaxError(ErrorKind::LexError, std::string("unexpected character '") + ch + "'",
                          start_line, start_col);
    }
    advance();
    push(type, std::string(1, ch), start_line, start_col);
  }
  tokens.push_back(Token{TokenType::EndOfFile, "", line, column});
  return tokens;
}

}  // namespace nnefx
