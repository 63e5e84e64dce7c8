#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nnefx/ast.hpp"
#include "nnefx/lexer.hpp"

namespace nnefx {

namespace detail {

// Pre-normalization argument as written at the call site.
struct RawArg {
  std::string name;  // empty if positional
  Argument value;
  int line;
  int column;
};

class ArityError : public SyntaxError {
 public:
  ArityError(const std::string& message, int line, int column)
      : SyntaxError(ErrorKind::ArityError, message, line, column) {}
};

class Parser {
 public:
  explicit Parser(const std::string& source) : tokens_(tokenize(source)) {}

  std::pair<NnefProgram, std::optional<GraphItemDecl>> parse() {
    NnefProgram program;
    expect_keyword("graph");
    program.name = expect(TokenType::Identifier).text;
    program.inputs = parse_idlist();
    expect(TokenType::Arrow);
    program.outputs = parse_idlist();

    std::optional<GraphItemDecl> item;
    if (peek().type == TokenType::Identifier && peek().text == "graphitem") {
      next();
      GraphItemDecl decl;
      decl.item_id = expect(TokenType::Identifier).text;
      decl.node_name = expect(TokenType::Identifier).text;
      decl.inputs = parse_idlist();
      expect(TokenType::Arrow);
      decl.outputs = parse_idlist();
      item = std::move(decl);
    }

    expect(TokenType::LBrace);
    while (peek().type != TokenType::RBrace) {
      program.instructions.push_back(parse_instruction());
    }
    next();  // '}'
    if (peek().type != TokenType::EndOfFile)
      throw err("trailing input after '}'");
    return {std::move(program), std::move(item)};
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  SyntaxError err(const std::string& message) const {
    return SyntaxError(ErrorKind::ParseError, message, peek().line, peek().column);
  }

  const Token& expect(TokenType type) {
    if (peek().type != type)
      throw err(std::string(token_type_name(type)) + " expected, got " +
                token_type_name(peek().type) +
                (peek().text.empty() ? "" : " '" + peek().text + "'"));
    return next();
  }

  void expect_keyword(const std::string& word) {
    if (peek().type != TokenType::Identifier || peek().text != word)
      throw err("'" + word + "' expected");
    next();
  }

  IdentList parse_idlist() {
    expect(TokenType::LParen);
    IdentList ids;
    if (peek().type != TokenType::RParen) {
      ids.push_back(expect(TokenType::Identifier).text);
      while (peek().type == TokenType::Comma) {
        next();
        ids.push_back(expect(TokenType::Identifier).text);
      }
    }
    expect(TokenType::RParen);
    return ids;
  }

  int64_t parse_int() {
    const Token& tok = expect(TokenType::Integer);
    return std::stoll(tok.text);
  }

  // Bracketed lists hold identifiers, integers or (lo, hi) tuples, never
  // mixed. An empty list is typed later by the parameter it binds to.
  Argument parse_list() {
    int line = peek().line, column = peek().column;
    expect(TokenType::LBracket);
    if (peek().type == TokenType::RBracket) {
      next();
      return IntList{};
    }
    if (peek().type == TokenType::Identifier) {
      IdentList ids;
      ids.push_back(next().text);
      while (peek().type == TokenType::Comma) {
        next();
        ids.push_back(expect(TokenType::Identifier).text);
      }
      expect(TokenType::RBracket);
      return ids;
    }
    if (peek().type == TokenType::Integer) {
      IntList ints;
      ints.push_back(parse_int());
      while (peek().type == TokenType::Comma) {
        next();
        ints.push_back(parse_int());
      }
      expect(TokenType::RBracket);
      return ints;
    }
    if (peek().type == TokenType::LParen) {
      TupleList tuples;
      tuples.push_back(parse_tuple());
      while (peek().type == TokenType::Comma) {
        next();
        tuples.push_back(parse_tuple());
      }
      expect(TokenType::RBracket);
      return tuples;
    }
    throw SyntaxError(ErrorKind::ParseError, "list element expected", line, column);
  }

  std::pair<int64_t, int64_t> parse_tuple() {
    expect(TokenType::LParen);
    int64_t lo = parse_int();
    expect(TokenType::Comma);
    int64_t hi = parse_int();
    expect(TokenType::RParen);
    return {lo, hi};
  }

  Argument parse_value() {
    switch (peek().type) {
      case TokenType::Identifier:
        return Ident{next().text};
      case TokenType::Integer:
        return parse_int();
      case TokenType::Float:
        return std::stod(next().text);
      case TokenType::String:
        return next().text;
      case TokenType::LBracket:
        return parse_list();
      case TokenType::LParen:
        return TupleList{parse_tuple()};
      default:
        throw err("argument expected");
    }
  }

  Instruction parse_instruction() {
    Instruction instr;
    const Token& result = expect(TokenType::Identifier);
    instr.result = result.text;
    instr.line = result.line;
    expect(TokenType::Equals);
    const Token& op_tok = expect(TokenType::Identifier);
    auto op = op_from_name(op_tok.text);
    if (!op)
      throw SyntaxError(ErrorKind::ParseError, "unknown operation '" + op_tok.text + "'",
                        op_tok.line, op_tok.column);
    instr.op = *op;

    expect(TokenType::LParen);
    std::vector<RawArg> raw;
    if (peek().type != TokenType::RParen) {
      raw.push_back(parse_raw_arg());
      while (peek().type == TokenType::Comma) {
        next();
        raw.push_back(parse_raw_arg());
      }
    }
    expect(TokenType::RParen);
    expect(TokenType::Semicolon);

    instr.args = normalize_args(instr, raw);
    return instr;
  }

  RawArg parse_raw_arg() {
    RawArg arg;
    arg.line = peek().line;
    arg.column = peek().column;
    if (peek().type == TokenType::Identifier && peek(1).type == TokenType::Equals) {
      arg.name = next().text;
      next();  // '='
      arg.value = parse_value();
    } else {
      arg.value = parse_value();
    }
    return arg;
  }

  ArityError arity(const Instruction& instr, const std::string& message, int line, int column) const {
    return ArityError(op_name(instr.op) + (": " + message), line, column);
  }

  // Binds positional then named arguments onto the op's canonical parameter
  // order and checks each value's kind.
  std::vector<Argument> normalize_args(const Instruction& instr, std::vector<RawArg>& raw) {
    const auto& params = op_params(instr.op);
    std::vector<std::optional<Argument>> slots(params.size());
    size_t positional = 0;
    bool named_seen = false;
    for (auto& arg : raw) {
      if (arg.name.empty()) {
        if (named_seen)
          throw arity(instr, "positional argument after named argument", arg.line, arg.column);
        if (positional >= params.size())
          throw arity(instr, "too many arguments", arg.line, arg.column);
        slots[positional++] = std::move(arg.value);
      } else {
        named_seen = true;
        size_t slot = params.size();
        for (size_t i = 0; i < params.size(); ++i) {
          if (arg.name == params[i].name) {
            slot = i;
            break;
          }
        }
        if (slot == params.size())
          throw arity(instr, "unknown parameter '" + arg.name + "'", arg.line, arg.column);
        if (slots[slot])
          throw arity(instr, "parameter '" + arg.name + "' given twice", arg.line, arg.column);
        slots[slot] = std::move(arg.value);
      }
    }
    std::vector<Argument> args;
    for (size_t i = 0; i < params.size(); ++i) {
      if (!slots[i])
        throw arity(instr, std::string("missing parameter '") + params[i].name + "'", instr.line, 1);
      args.push_back(coerce(instr, params[i], std::move(*slots[i])));
    }
    if (instr.op == Op::Split && std::get<TupleList>(args[2]).size() != 1)
      throw arity(instr, "exactly one (lo, hi) range per split instruction", instr.line, 1);
    return args;
  }

  Argument coerce(const Instruction& instr, const Param& param, Argument value) {
    auto fail = [&]() {
      return arity(instr,
                   std::string("parameter '") + param.name + "' has the wrong kind", instr.line, 1);
    };
    switch (param.kind) {
      case ArgKind::Var:
        if (!std::holds_alternative<Ident>(value)) throw fail();
        return value;
      case ArgKind::Int:
        if (!std::holds_alternative<int64_t>(value)) throw fail();
        return value;
      case ArgKind::Float:
        if (std::holds_alternative<int64_t>(value)) return static_cast<double>(std::get<int64_t>(value));
        if (!std::holds_alternative<double>(value)) throw fail();
        return value;
      case ArgKind::Str:
        if (!std::holds_alternative<std::string>(value)) throw fail();
        return value;
      case ArgKind::Ints:
        if (!std::holds_alternative<IntList>(value)) throw fail();
        return value;
      case ArgKind::Tuples:
        if (std::holds_alternative<IntList>(value) && std::get<IntList>(value).empty())
          return TupleList{};
        if (!std::holds_alternative<TupleList>(value)) throw fail();
        return value;
      case ArgKind::Idents:
        if (std::holds_alternative<IntList>(value) && std::get<IntList>(value).empty())
          return IdentList{};
        if (!std::holds_alternative<IdentList>(value)) throw fail();
        return value;
    }
    throw fail();
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace detail

inline NnefProgram parse_program(const std::string& source) {
  detail::Parser parser(source);
  auto [program, item] = parser.parse();
  if (item)
    throw Error(ErrorKind::ParseError,
                "'" + item->item_id + "' is an item file; use parse_item_program");
  return std::move(program);
}

inline ItemProgram parse_item_program(const std::string& source) {
  detail::Parser parser(source);
  auto [program, item] = parser.parse();
  if (!item) throw Error(ErrorKind::ParseError, "graphitem header missing in item file");
  std::vector<std::string> written;
  for (const auto& instr : program.instructions) {
    if (instr.op != Op::SendVar) continue;
    for (const auto& prev : written) {
      if (prev == instr.result)
        throw SyntaxError(ErrorKind::DuplicateWriter,
                          "second send_var writing '" + instr.result + "'", instr.line, 1);
    }
    written.push_back(instr.result);
  }
  return ItemProgram{std::move(program), std::move(*item)};
}

// Accepts either form; the CLI auto-detects which file kind it was given.
inline std::pair<NnefProgram, std::optional<GraphItemDecl>> parse_any(const std::string& source) {
  detail::Parser parser(source);
  return parser.parse();
}

}  // namespace nnefx
