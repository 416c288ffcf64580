"""
pPCF concrete syntax parser
Turns program text into the abstract syntax of syntax.py
"""

import re
from dataclasses import dataclass
from typing import List, Tuple

import sympy as sp

from ..errors import ParseError
from .syntax import NAT, App, Arrow, Coin, Fix, If, Lam, Num, PTerm, PType, Succ, Var, desugar_choice, desugar_let

KEYWORDS = {"nat", "coin", "succ", "if", "let", "in", "fix"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class Tokenizer:
    """Regex tokenizer shared by the pPCF and FPC front-ends"""

    def __init__(self, symbols: Tuple[str, ...], keywords: set):
        self.keywords = keywords
        # longest symbols first so "(+" wins over "("
        ordered = sorted(symbols, key=len, reverse=True)
        self.pattern = re.compile(
            r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
            r"|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
            r"|(?P<sym>" + "|".join(re.escape(s) for s in ordered) + ")"
        )

    def tokenize(self, text: str) -> List[Token]:
        tokens = []
        line, line_start, pos = 1, 0, 0
        while pos < len(text):
            match = self.pattern.match(text, pos)
            column = pos - line_start + 1
            if not match:
                raise ParseError(f"unexpected character {text[pos]!r}", line, column)
            kind = match.lastgroup
            value = match.group()
            if kind == "nl":
                line, line_start = line + 1, match.end()
            elif kind == "ident":
                tokens.append(Token("kw" if value in self.keywords else "ident", value, line, column))
            elif kind in ("num", "sym"):
                tokens.append(Token(kind, value, line, column))
            pos = match.end()
        tokens.append(Token("eof", "", line, pos - line_start + 1))
        return tokens


class TokenStream:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def at(self, *texts: str) -> bool:
        tok = self.current
        return tok.kind in ("kw", "sym") and tok.text in texts

    def advance(self) -> Token:
        tok = self.current
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, expected=()):
        tok = self.current
        found = tok.text or "end of input"
        raise ParseError(f"{message}, found {found!r}", tok.line, tok.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}", (text,))
        return self.advance()

    def ident(self) -> str:
        if self.current.kind != "ident":
            self.fail("expected an identifier", ("identifier",))
        return self.advance().text

    def natural(self) -> int:
        if self.current.kind != "num":
            self.fail("expected a natural number", ("number",))
        return int(self.advance().text)


PPCF_TOKENS = Tokenizer(("(+", "->", "→", "\\", "λ", "(", ")", ",", ".", ":", "/", "="), KEYWORDS)

_ATOM_START = ("coin", "succ", "if", "let", "fix", "(")


class PPCFParser:
    """
    Recursive-descent parser for the grammar

        type   ::= "nat" | "(" type ")" | type "->" type           (right-assoc)
        term   ::= "\\" ident ":" type "." term | choice
        choice ::= app [ "(+" rat ")" app ]
        app    ::= atom { atom }
        atom   ::= nat | ident | "coin" "(" rat ")" | "succ" "(" term ")"
                 | "if" "(" term "," term "," ident "." term ")"
                 | "let" ident "=" term "in" term | "fix" "(" term ")" | "(" term ")"
        rat    ::= nat [ "/" nat ]      with value in [0, 1]
    """

    def parse(self, text: str) -> PTerm:
        stream = TokenStream(PPCF_TOKENS.tokenize(text))
        term = self._term(stream)
        if stream.current.kind != "eof":
            stream.fail("trailing input", ("end of input",))
        return term

    def parse_type(self, text: str) -> PType:
        stream = TokenStream(PPCF_TOKENS.tokenize(text))
        t = self._type(stream)
        if stream.current.kind != "eof":
            stream.fail("trailing input", ("end of input",))
        return t

    def _type(self, s: TokenStream) -> PType:
        if s.at("nat"):
            s.advance()
            left = NAT
        elif s.at("("):
            s.advance()
            left = self._type(s)
            s.expect(")")
        else:
            s.fail("expected a type", ("nat", "("))
        if s.at("->", "→"):
            s.advance()
            return Arrow(left, self._type(s))
        return left

    def _term(self, s: TokenStream) -> PTerm:
        if s.at("\\", "λ"):
            s.advance()
            x = s.ident()
            s.expect(":")
            t = self._type(s)
            s.expect(".")
            return Lam(x, t, self._term(s))
        return self._choice(s)

    def _choice(self, s: TokenStream) -> PTerm:
        left = self._app(s)
        if s.at("(+"):
            s.advance()
            kappa = self._rat(s)
            s.expect(")")
            return desugar_choice(left, kappa, self._app(s))
        return left

    def _starts_atom(self, s: TokenStream) -> bool:
        return s.current.kind in ("num", "ident") or s.at(*_ATOM_START)

    def _app(self, s: TokenStream) -> PTerm:
        if not self._starts_atom(s):
            s.fail("expected a term", ("number", "identifier", "\\") + _ATOM_START)
        term = self._atom(s)
        while self._starts_atom(s):
            term = App(term, self._atom(s))
        return term

    def _rat(self, s: TokenStream) -> sp.Rational:
        start = s.current
        num = s.natural()
        den = 1
        if s.at("/"):
            s.advance()
            den = s.natural()
        if den == 0:
            raise ParseError("zero denominator in probability", start.line, start.column)
        value = sp.Rational(num, den)
        if value > 1:
            raise ParseError(f"probability {value} is not in [0, 1]", start.line, start.column)
        return value

    def _atom(self, s: TokenStream) -> PTerm:
        tok = s.current
        if tok.kind == "num":
            return Num(s.natural())
        if tok.kind == "ident":
            return Var(s.advance().text)
        if s.at("coin"):
            s.advance()
            s.expect("(")
            kappa = self._rat(s)
            s.expect(")")
            return Coin(kappa)
        if s.at("succ", "fix"):
            keyword = s.advance().text
            s.expect("(")
            body = self._term(s)
            s.expect(")")
            return Succ(body) if keyword == "succ" else Fix(body)
        if s.at("if"):
            s.advance()
            s.expect("(")
            scrutinee = self._term(s)
            s.expect(",")
            zero_branch = self._term(s)
            s.expect(",")
            z = s.ident()
            s.expect(".")
            succ_branch = self._term(s)
            s.expect(")")
            return If(scrutinee, zero_branch, z, succ_branch)
        if s.at("let"):
            s.advance()
            x = s.ident()
            s.expect("=")
            bound = self._term(s)
            s.expect("in")
            return desugar_let(x, bound, self._term(s))
        s.expect("(")
        inner = self._term(s)
        s.expect(")")
        return inner


_parser = PPCFParser()


def parse(text: str) -> PTerm:
    return _parser.parse(text)


def parse_type(text: str) -> PType:
    return _parser.parse_type(text)
