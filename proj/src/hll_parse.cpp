#include <cctype>

#include "tagc/hll.hpp"

namespace tagc {

namespace {

enum class TokKind { Ident, Int, Punct, End };

struct Token {
  TokKind kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> lex() {
    std::vector<Token> out;
    while (true) {
      skipWs();
      if (i_ >= src_.size()) break;
      SourcePos pos = pos_;
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back({TokKind::Ident, lexWhile([](char ch) {
                         return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
                       }),
                       pos});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back({TokKind::Int, lexWhile([](char ch) {
                         return std::isdigit(static_cast<unsigned char>(ch)) != 0;
                       }),
                       pos});
      } else {
        static const char* twoChar[] = {"==", "!=", "<=", ">="};
        std::string two = src_.substr(i_, 2).size() == 2
                              ? std::string(src_.substr(i_, 2))
                              : std::string();
        bool matched = false;
        for (const char* t : twoChar) {
          if (two == t) {
            out.push_back({TokKind::Punct, two, pos});
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (matched) continue;
        static const std::string oneChar = "(){},;=<>+-@";
        if (oneChar.find(c) == std::string::npos) {
          throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
        out.push_back({TokKind::Punct, std::string(1, c), pos});
        advance();
      }
    }
    out.push_back({TokKind::End, "", pos_});
    return out;
  }

 private:
  void advance() {
    if (i_ < src_.size()) {
      if (src_[i_] == '\n') {
        pos_.line++;
        pos_.col = 1;
      } else {
        pos_.col++;
      }
      i_++;
    }
  }

  void skipWs() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  template <typename Pred>
  std::string lexWhile(Pred pred) {
    std::string s;
    while (i_ < src_.size() && pred(src_[i_])) {
      s += src_[i_];
      advance();
    }
    return s;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  SourcePos pos_{1, 1};
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const HllPolicy& pol)
      : toks_(std::move(toks)), pol_(pol) {}

  HllProgram program() {
    HllProgram prog;
    while (!at(TokKind::End)) {
      FunDef fn = fundef();
      if (prog.functions.count(fn.name)) {
        throw WellFormednessError("duplicate function " + fn.name);
      }
      prog.functions.emplace(fn.name, std::move(fn));
    }
    if (prog.functions.empty()) {
      throw ParseError(peek().pos, "expected at least one function");
    }
    checkWellFormed(prog);
    return prog;
  }

 private:
  const Token& peek(int k = 0) const {
    std::size_t i = std::min(i_ + static_cast<std::size_t>(k), toks_.size() - 1);
    return toks_[i];
  }
  bool at(TokKind k) const { return peek().kind == k; }
  bool atPunct(std::string_view p) const {
    return peek().kind == TokKind::Punct && peek().text == p;
  }
  bool atKeyword(std::string_view kw) const {
    return peek().kind == TokKind::Ident && peek().text == kw;
  }
  Token take() { return toks_[i_ >= toks_.size() - 1 ? i_ : i_++]; }
  Token expectPunct(std::string_view p) {
    if (!atPunct(p)) {
      throw ParseError(peek().pos, "expected '" + std::string(p) + "', found '" +
                                       peek().text + "'");
    }
    return take();
  }
  Token expectIdent() {
    if (!at(TokKind::Ident)) {
      throw ParseError(peek().pos, "expected identifier, found '" + peek().text + "'");
    }
    return take();
  }
  void expectKeyword(std::string_view kw) {
    if (!atKeyword(kw)) {
      throw ParseError(peek().pos,
                       "expected '" + std::string(kw) + "', found '" + peek().text + "'");
    }
    take();
  }

  // Tag literals extend to the next token boundary after '@'; they lex as an
  // identifier or integer token.
  std::string tagLiteral() {
    if (!at(TokKind::Ident) && !at(TokKind::Int)) {
      throw ParseError(peek().pos, "expected tag literal, found '" + peek().text + "'");
    }
    return take().text;
  }

  VTag vtagLit() {
    SourcePos pos = peek().pos;
    std::string text = tagLiteral();
    auto t = pol_.parseVTag(text);
    if (!t) {
      throw ParseError(pos, "unknown " + std::string(pol_.name()) + " value tag '" +
                                text + "'");
    }
    return *t;
  }

  PTag ptagLit() {
    SourcePos pos = peek().pos;
    std::string text = tagLiteral();
    auto t = pol_.parsePTag(text);
    if (!t) {
      throw ParseError(pos, "unknown " + std::string(pol_.name()) + " PC tag '" + text +
                                "'");
    }
    return *t;
  }

  FunDef fundef() {
    expectKeyword("fun");
    FunDef fn;
    fn.name = expectIdent().text;
    expectPunct("(");
    if (!atPunct(")")) {
      fn.params.push_back(expectIdent().text);
      while (atPunct(",")) {
        take();
        fn.params.push_back(expectIdent().text);
      }
    }
    expectPunct(")");
    expectKeyword("tag");
    fn.fnTag = ptagLit();
    expectPunct("{");
    if (atKeyword("var")) {
      take();
      fn.locals.push_back(expectIdent().text);
      while (atPunct(",")) {
        take();
        fn.locals.push_back(expectIdent().text);
      }
      expectPunct(";");
    }
    fn.body = stmtList();
    expectPunct("}");
    return fn;
  }

  StmtPtr stmtList() {
    std::vector<StmtPtr> items;
    items.push_back(stmt());
    while (atPunct(";")) {
      take();
      items.push_back(stmt());
    }
    return seqOf(std::move(items));
  }

  StmtPtr stmt() {
    if (atKeyword("skip")) {
      take();
      return makeSkip();
    }
    if (atKeyword("return")) {
      take();
      expectPunct("(");
      ExprPtr e = expr();
      expectPunct(")");
      return makeReturn(std::move(e));
    }
    if (atKeyword("if")) {
      take();
      expectPunct("(");
      ExprPtr lhs = expr();
      RelOp cmp = relop();
      ExprPtr rhs = expr();
      expectPunct(")");
      expectPunct("{");
      StmtPtr thenB = stmtList();
      expectPunct("}");
      expectKeyword("else");
      expectPunct("{");
      StmtPtr elseB = stmtList();
      expectPunct("}");
      return makeIf(std::move(lhs), cmp, std::move(rhs), std::move(thenB),
                    std::move(elseB));
    }
    if (atKeyword("while")) {
      take();
      expectPunct("(");
      ExprPtr lhs = expr();
      RelOp cmp = relop();
      ExprPtr rhs = expr();
      expectPunct(")");
      expectPunct("{");
      StmtPtr body = stmtList();
      expectPunct("}");
      return makeWhile(std::move(lhs), cmp, std::move(rhs), std::move(body));
    }
    if (at(TokKind::Ident)) {
      std::string target = take().text;
      expectPunct("=");
      // Two-token lookahead separates calls from plain variable expressions.
      if (at(TokKind::Ident) && peek(1).kind == TokKind::Punct && peek(1).text == "(") {
        std::string callee = take().text;
        expectPunct("(");
        std::vector<ExprPtr> args;
        if (!atPunct(")")) {
          args.push_back(expr());
          while (atPunct(",")) {
            take();
            args.push_back(expr());
          }
        }
        expectPunct(")");
        return makeCall(std::move(target), std::move(callee), std::move(args));
      }
      return makeAssign(std::move(target), expr());
    }
    throw ParseError(peek().pos, "expected statement, found '" + peek().text + "'");
  }

  RelOp relop() {
    if (peek().kind == TokKind::Punct) {
      auto r = relOpFromName(peek().text);
      if (r) {
        take();
        return *r;
      }
    }
    throw ParseError(peek().pos,
                     "expected relational operator, found '" + peek().text + "'");
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (atPunct("+") || atPunct("-")) {
      BinOp op = take().text == "+" ? BinOp::Add : BinOp::Sub;
      e = makeBin(op, std::move(e), term());
    }
    return e;
  }

  ExprPtr term() {
    if (atPunct("(")) {
      take();
      ExprPtr e = expr();
      expectPunct(")");
      return e;
    }
    if (at(TokKind::Int)) {
      Token tok = take();
      Value v = 0;
      try {
        v = std::stoull(tok.text);
      } catch (const std::exception&) {
        throw ParseError(tok.pos, "integer literal out of range: " + tok.text);
      }
      VTag tag = pol_.defTag();  // untagged literals
      if (atPunct("@")) {
        take();
        tag = vtagLit();
      }
      return makeLit(Atom{v, tag});
    }
    if (at(TokKind::Ident)) {
      return makeVar(take().text);
    }
    throw ParseError(peek().pos, "expected expression, found '" + peek().text + "'");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const HllPolicy& pol_;
};

}  // namespace

HllProgram parseProgram(std::string_view text, const HllPolicy& pol) {
  Lexer lexer(text);
  Parser parser(lexer.lex(), pol);
  return parser.program();
}

}  // namespace tagc
