#include <cctype>
#include <string>
#include <vector>

#include "ltlzinc/error.hpp"
#include "ltlzinc/formula.hpp"

namespace ltlzinc {

namespace {

enum class Tok {
  Ident,
  True,
  False,
  Not,
  Next,
  WeakNext,
  Finally,
  Globally,
  Until,
  Release,
  And,
  Or,
  Implies,
  Iff,
  LParen,
  RParen,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "end of input", line_, column_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      advance(1);
    }
  }

  void advance(std::size_t bytes) {
    for (std::size_t i = 0; i < bytes; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++column_;  // count code points, not continuation bytes
      }
      ++pos_;
    }
  }

  bool starts_with(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }

  Token emit(Tok kind, std::size_t bytes) {
    Token t{kind, std::string(text_.substr(pos_, bytes)), line_, column_};
    advance(bytes);
    return t;
  }

  Token next() {
    struct Fixed {
      std::string_view text;
      Tok kind;
    };
    // Longest spellings first.
    static constexpr Fixed fixed[] = {
        {"<->", Tok::Iff},       {"->", Tok::Implies},
        {"&&", Tok::And},        {"||", Tok::Or},
        {"&", Tok::And},         {"|", Tok::Or},
        {"!", Tok::Not},         {"(", Tok::LParen},
        {")", Tok::RParen},      {"\xE2\x97\xAF", Tok::Next},
        {"\xE2\x97\x87", Tok::Finally}, {"\xE2\x96\xA1", Tok::Globally},
        {"\xE2\x86\x94", Tok::Iff},     {"\xE2\x86\x92", Tok::Implies},
        {"\xE2\x88\xA7", Tok::And},     {"\xE2\x88\xA8", Tok::Or},
        {"\xC2\xAC", Tok::Not},
    };
    for (const auto& f : fixed) {
      if (starts_with(f.text)) return emit(f.kind, f.text.size());
    }

    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_ + 1;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_')) {
        ++end;
      }
      std::string_view word = text_.substr(pos_, end - pos_);
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      else if (word == "X") kind = Tok::Next;
      else if (word == "WX") kind = Tok::WeakNext;
      else if (word == "F") kind = Tok::Finally;
      else if (word == "G") kind = Tok::Globally;
      else if (word == "U") kind = Tok::Until;
      else if (word == "R") kind = Tok::Release;
      return emit(kind, word.size());
    }

    std::size_t len = 1;
    auto lead = static_cast<unsigned char>(c);
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, text_.size() - pos_);
    throw UnknownTokenError(
        "unknown token '" + std::string(text_.substr(pos_, len)) + "'", line_,
        column_, {});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

const std::vector<std::string>& operand_start() {
  static const std::vector<std::string> v = {
      "identifier", "true", "false", "(", "!", "X", "WX", "F", "G"};
  return v;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula parse() {
    Formula f = iff();
    if (peek().kind != Tok::End) {
      fail({"&", "|", "->", "<->", "U", "R", "end of input"});
    }
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "unexpected '" + t.text + "', expected one of:";
    for (const auto& e : expected) msg += " " + e;
    throw SyntaxError(msg, t.line, t.column, std::move(expected));
  }

  Formula iff() {
    Formula f = implies();
    while (accept(Tok::Iff)) f = Formula::make(Op::Iff, f, implies());
    return f;
  }

  Formula implies() {
    Formula f = disjunction();
    if (accept(Tok::Implies)) return Formula::make(Op::Implies, f, implies());
    return f;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::Or)) f = Formula::lor(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = binary_temporal();
    while (accept(Tok::And)) f = Formula::land(f, binary_temporal());
    return f;
  }

  Formula binary_temporal() {
    Formula f = unary();
    if (accept(Tok::Until)) return Formula::make(Op::Until, f, binary_temporal());
    if (accept(Tok::Release)) {
      return Formula::make(Op::Release, f, binary_temporal());
    }
    return f;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Not: ++pos_; return Formula::lnot(unary());
      case Tok::Next: ++pos_; return Formula::make(Op::Next, unary());
      case Tok::WeakNext: ++pos_; return Formula::make(Op::WeakNext, unary());
      case Tok::Finally: ++pos_; return Formula::make(Op::Finally, unary());
      case Tok::Globally: ++pos_; return Formula::make(Op::Globally, unary());
      default: return primary();
    }
  }

  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: ++pos_; return Formula::atom(t.text);
      case Tok::True: ++pos_; return Formula::tt();
      case Tok::False: ++pos_; return Formula::ff();
      case Tok::LParen: {
        ++pos_;
        Formula f = iff();
        if (!accept(Tok::RParen)) {
          fail({"&", "|", "->", "<->", "U", "R", ")"});
        }
        return f;
      }
      default:
        fail(operand_start());
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

int precedence(Op op) {
  switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Until:
    case Op::Release: return 5;
    case Op::Not:
    case Op::Next:
    case Op::WeakNext:
    case Op::Finally:
    case Op::Globally: return 6;
    default: return 7;
  }
}

bool right_assoc(Op op) {
  return op == Op::Implies || op == Op::Until || op == Op::Release;
}

void print(const Formula& f, int min_prec, std::string& out) {
  const int prec = precedence(f.op());
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (f.op()) {
    case Op::True: out += "true"; break;
    case Op::False: out += "false"; break;
    case Op::Atom: out += f.name(); break;
    case Op::Not:
      out += '!';
      print(f.child(0), 6, out);
      break;
    case Op::Next:
    case Op::WeakNext:
    case Op::Finally:
    case Op::Globally:
      out += f.op() == Op::Next       ? "X "
             : f.op() == Op::WeakNext ? "WX "
             : f.op() == Op::Finally  ? "F "
                                      : "G ";
      print(f.child(0), 6, out);
      break;
    default: {
      const char* sym = f.op() == Op::And       ? " & "
                        : f.op() == Op::Or      ? " | "
                        : f.op() == Op::Implies ? " -> "
                        : f.op() == Op::Iff     ? " <-> "
                        : f.op() == Op::Until   ? " U "
                                                : " R ";
      const bool right = right_assoc(f.op());
      print(f.lhs(), right ? prec + 1 : prec, out);
      out += sym;
      print(f.rhs(), right ? prec : prec + 1, out);
      break;
    }
  }
  if (paren) out += ')';
}

}  // namespace

Formula parse_ltlf(std::string_view text) {
  return Parser(Lexer(text).run()).parse();
}

std::string to_string(const Formula& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

}  // namespace ltlzinc
