#include "wfc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace wfc {

namespace {

struct Token {
  enum class Kind {
    Ident,      // lowercase-led name or number
    Variable,   // uppercase-led name
    Directive,  // #domain, #defined, #param
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,  // :-
    Not,
    Amp,
    Pipe,
    Bang,
    End,
  };
  Kind kind;
  std::string text;
  int line, column;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws_and_comments();
    const int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Token::Kind::End, "", line, col};
    const char c = text_[pos_];
    if (c == '(') return make(Token::Kind::LParen, "(", line, col);
    if (c == ')') return make(Token::Kind::RParen, ")", line, col);
    if (c == ',') return make(Token::Kind::Comma, ",", line, col);
    if (c == '.') return make(Token::Kind::Dot, ".", line, col);
    if (c == '&') return make(Token::Kind::Amp, "&", line, col);
    if (c == '|') return make(Token::Kind::Pipe, "|", line, col);
    if (c == '!') return make(Token::Kind::Bang, "!", line, col);
    if (c == ':') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        advance();
        advance();
        return {Token::Kind::Arrow, ":-", line, col};
      }
      throw ParseError("expected ':-'", line, col);
    }
    if (c == '#') {
      advance();
      std::string word = read_word();
      if (word != "domain" && word != "defined" && word != "param")
        throw ParseError("unknown directive #" + word, line, col);
      return {Token::Kind::Directive, word, line, col};
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string word = read_word();
      if (word == "not") return {Token::Kind::Not, word, line, col};
      const bool is_var = std::isupper(static_cast<unsigned char>(word[0]));
      return {is_var ? Token::Kind::Variable : Token::Kind::Ident, word, line, col};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

private:
  Token make(Token::Kind kind, std::string text, int line, int col) {
    advance();
    return {kind, std::move(text), line, col};
  }

  void advance() {
    if (pos_ < text_.size()) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string read_word() {
    std::string word;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        word += c;
        advance();
      } else {
        break;
      }
    }
    return word;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class ProgramParser {
public:
  explicit ProgramParser(std::string_view text) : lexer_(text) { shift(); }

  Program parse() {
    Program program;
    std::set<std::string> declared;
    while (tok_.kind != Token::Kind::End) {
      if (tok_.kind == Token::Kind::Directive) {
        const std::string directive = tok_.text;
        const Token at = tok_;
        shift();
        if (directive == "domain") {
          while (tok_.kind == Token::Kind::Ident) {
            program.domain.push_back(tok_.text);
            shift();
            if (tok_.kind == Token::Kind::Comma) shift();
          }
          if (program.domain.empty()) throw ParseError("#domain needs constants", at.line, at.column);
        } else {
          if (tok_.kind != Token::Kind::Ident)
            throw ParseError("#" + directive + " needs a predicate or ground atom", tok_.line,
                             tok_.column);
          const Token first = tok_;
          const RuleAtom atom = parse_atom();
          if (!atom.ground())
            throw ParseError("#" + directive + " declarations must be ground", first.line,
                             first.column);
          const std::string name = atom.to_string();
          if (!declared.insert(name).second)
            throw ParseError("duplicate declaration of " + name, first.line, first.column);
          (directive == "defined" ? program.defined_decls : program.param_decls).push_back(name);
        }
        expect(Token::Kind::Dot, "'.'");
        continue;
      }
      program.rules.push_back(parse_rule());
    }
    for (const auto& p : program.param_decls)
      for (const auto& r : program.rules)
        if (r.head.pred == p || r.head.to_string() == p)
          throw ParseError("DefinedAtomDeclaredParam: " + p + " occurs in a rule head", 1, 1);
    return program;
  }

private:
  Rule parse_rule() {
    Rule rule;
    rule.head = parse_atom();
    if (tok_.kind == Token::Kind::Arrow) {
      shift();
      rule.body.push_back(parse_literal());
      while (tok_.kind == Token::Kind::Comma) {
        shift();
        rule.body.push_back(parse_literal());
      }
    }
    expect(Token::Kind::Dot, "'.'");
    return rule;
  }

  RuleLiteral parse_literal() {
    RuleLiteral lit;
    if (tok_.kind == Token::Kind::Not) {
      lit.positive = false;
      shift();
    }
    lit.atom = parse_atom();
    return lit;
  }

  RuleAtom parse_atom() {
    if (tok_.kind != Token::Kind::Ident)
      throw ParseError("expected an atom, got '" + tok_.text + "'", tok_.line, tok_.column);
    RuleAtom atom;
    atom.pred = tok_.text;
    shift();
    if (tok_.kind == Token::Kind::LParen) {
      shift();
      atom.args.push_back(parse_term());
      while (tok_.kind == Token::Kind::Comma) {
        shift();
        atom.args.push_back(parse_term());
      }
      expect(Token::Kind::RParen, "')'");
    }
    return atom;
  }

  Arg parse_term() {
    if (tok_.kind == Token::Kind::Ident) {
      Arg a{tok_.text, false};
      shift();
      return a;
    }
    if (tok_.kind == Token::Kind::Variable) {
      Arg a{tok_.text, true};
      shift();
      return a;
    }
    throw ParseError("expected a constant or variable", tok_.line, tok_.column);
  }

  void expect(Token::Kind kind, const std::string& what) {
    if (tok_.kind != kind)
      throw ParseError("expected " + what + ", got '" + tok_.text + "'", tok_.line, tok_.column);
    shift();
  }

  void shift() { tok_ = lexer_.next(); }

  Lexer lexer_;
  Token tok_{Token::Kind::End, "", 0, 0};
};

class EvidenceParser {
public:
  EvidenceParser(std::string_view text, const Alphabet& alphabet)
      : lexer_(text), alphabet_(alphabet) {
    shift();
  }

  Expr parse() {
    Expr e = parse_or();
    if (tok_.kind != Token::Kind::End)
      throw ParseError("trailing input in evidence formula", tok_.line, tok_.column);
    return e;
  }

private:
  Expr parse_or() {
    std::vector<Expr> parts;
    parts.push_back(parse_and());
    while (tok_.kind == Token::Kind::Pipe) {
      shift();
      parts.push_back(parse_and());
    }
    return Expr::disj(std::move(parts));
  }

  Expr parse_and() {
    std::vector<Expr> parts;
    parts.push_back(parse_unary());
    while (tok_.kind == Token::Kind::Amp) {
      shift();
      parts.push_back(parse_unary());
    }
    return Expr::conj(std::move(parts));
  }

  Expr parse_unary() {
    if (tok_.kind == Token::Kind::Bang || tok_.kind == Token::Kind::Not) {
      shift();
      return Expr::negate(parse_unary());
    }
    if (tok_.kind == Token::Kind::LParen) {
      shift();
      Expr e = parse_or();
      if (tok_.kind != Token::Kind::RParen)
        throw ParseError("expected ')'", tok_.line, tok_.column);
      shift();
      return e;
    }
    if (tok_.kind != Token::Kind::Ident)
      throw ParseError("expected an atom in evidence formula", tok_.line, tok_.column);
    if (tok_.text == "true") {
      shift();
      return Expr::constant(true);
    }
    if (tok_.text == "false") {
      shift();
      return Expr::constant(false);
    }
    // ground atom, possibly with an argument tuple
    std::string name = tok_.text;
    const Token at = tok_;
    shift();
    if (tok_.kind == Token::Kind::LParen) {
      name += "(";
      shift();
      bool first = true;
      while (tok_.kind == Token::Kind::Ident || tok_.kind == Token::Kind::Variable) {
        if (!first) name += ",";
        first = false;
        name += tok_.text;
        shift();
        if (tok_.kind == Token::Kind::Comma) shift();
      }
      if (tok_.kind != Token::Kind::RParen)
        throw ParseError("expected ')' after atom arguments", tok_.line, tok_.column);
      name += ")";
      shift();
    }
    auto id = alphabet_.find(name);
    if (!id) throw ParseError("unknown atom in evidence: " + name, at.line, at.column);
    return Expr::atom_ref(*id);
  }

  void shift() { tok_ = lexer_.next(); }

  Lexer lexer_;
  const Alphabet& alphabet_;
  Token tok_{Token::Kind::End, "", 0, 0};
};

}  // namespace

Program parse(std::string_view text) { return ProgramParser(text).parse(); }

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open program file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

Expr parse_evidence(std::string_view text, const Alphabet& alphabet) {
  return EvidenceParser(text, alphabet).parse();
}

}  // namespace wfc
