"""
FPC concrete syntax parser, sharing the tokenizer of the pPCF front-end
"""

from ..errors import ParseError
from ..ppcf.parser import Tokenizer, TokenStream
from .syntax import Case, Elim, FApp, FArrow, FLam, FTerm, FType, FVar, Fst, Inl, Inr, Intro, Mu, Pair, Prod, Snd, Sum, TVar

KEYWORDS = {"mu", "inl", "inr", "case", "of", "end", "fst", "snd", "intro", "elim"}

FPC_TOKENS = Tokenizer(
    ("->", "→", "\\", "λ", "μ", "+", "*", "|", "[", "]", "(", ")", ",", ".", ":"), KEYWORDS
)

EMPTY_TYPE = Mu("X", TVar("X"))
ONE_TYPE = FArrow(EMPTY_TYPE, EMPTY_TYPE)

_ATOM_START = ("inl", "inr", "case", "fst", "snd", "intro", "elim", "(")


class FPCParser:
    """
    Recursive-descent parser for

        type  ::= sum [ "->" type ]
        sum   ::= prod { "+" prod }
        prod  ::= tatom { "*" tatom }
        tatom ::= ident | "0" | "1" | "mu" ident "." type | "(" type ")"
        term  ::= "\\" ident ":" type "." term | app
        app   ::= atom { atom }
        atom  ::= ident | "inl" "[" type "," type "]" "(" term ")" | "inr" ...
                | "case" term "of" "inl" ident "." term "|" "inr" ident "." term "end"
                | "(" term "," term ")" | "fst" "(" term ")" | "snd" "(" term ")"
                | "intro" "[" type "]" "(" term ")" | "elim" "(" term ")" | "(" term ")"

    where 0 stands for mu X. X and 1 for 0 -> 0.
    """

    def parse(self, text: str) -> FTerm:
        stream = TokenStream(FPC_TOKENS.tokenize(text))
        term = self._term(stream)
        if stream.current.kind != "eof":
            stream.fail("trailing input", ("end of input",))
        return term

    def parse_type(self, text: str) -> FType:
        stream = TokenStream(FPC_TOKENS.tokenize(text))
        t = self._type(stream)
        if stream.current.kind != "eof":
            stream.fail("trailing input", ("end of input",))
        return t

    def _type(self, s: TokenStream) -> FType:
        left = self._sum(s)
        if s.at("->", "→"):
            s.advance()
            return FArrow(left, self._type(s))
        return left

    def _sum(self, s: TokenStream) -> FType:
        t = self._prod(s)
        while s.at("+"):
            s.advance()
            t = Sum(t, self._prod(s))
        return t

    def _prod(self, s: TokenStream) -> FType:
        t = self._tatom(s)
        while s.at("*"):
            s.advance()
            t = Prod(t, self._tatom(s))
        return t

    def _tatom(self, s: TokenStream) -> FType:
        tok = s.current
        if tok.kind == "ident":
            return TVar(s.advance().text)
        if tok.kind == "num" and tok.text in ("0", "1"):
            s.advance()
            return EMPTY_TYPE if tok.text == "0" else ONE_TYPE
        if s.at("mu", "μ"):
            s.advance()
            x = s.ident()
            s.expect(".")
            return Mu(x, self._type(s))
        if s.at("("):
            s.advance()
            t = self._type(s)
            s.expect(")")
            return t
        s.fail("expected a type", ("identifier", "0", "1", "mu", "("))

    def _mu_type(self, s: TokenStream) -> Mu:
        tok = s.current
        t = self._type(s)
        if not isinstance(t, Mu):
            raise ParseError("intro needs a mu type annotation", tok.line, tok.column, ("mu",))
        return t

    def _term(self, s: TokenStream) -> FTerm:
        if s.at("\\", "λ"):
            s.advance()
            x = s.ident()
            s.expect(":")
            t = self._type(s)
            s.expect(".")
            return FLam(x, t, self._term(s))
        return self._app(s)

    def _starts_atom(self, s: TokenStream) -> bool:
        return s.current.kind == "ident" or s.at(*_ATOM_START)

    def _app(self, s: TokenStream) -> FTerm:
        if not self._starts_atom(s):
            s.fail("expected a term", ("identifier", "\\") + _ATOM_START)
        term = self._atom(s)
        while self._starts_atom(s):
            term = FApp(term, self._atom(s))
        return term

    def _parenthesized(self, s: TokenStream) -> FTerm:
        s.expect("(")
        inner = self._term(s)
        s.expect(")")
        return inner

    def _atom(self, s: TokenStream) -> FTerm:
        if s.current.kind == "ident":
            return FVar(s.advance().text)
        if s.at("inl", "inr"):
            keyword = s.advance().text
            s.expect("[")
            left = self._type(s)
            s.expect(",")
            right = self._type(s)
            s.expect("]")
            body = self._parenthesized(s)
            return Inl(left, right, body) if keyword == "inl" else Inr(left, right, body)
        if s.at("case"):
            s.advance()
            scrutinee = self._term(s)
            s.expect("of")
            s.expect("inl")
            x = s.ident()
            s.expect(".")
            left = self._term(s)
            s.expect("|")
            s.expect("inr")
            y = s.ident()
            s.expect(".")
            right = self._term(s)
            s.expect("end")
            return Case(scrutinee, x, left, y, right)
        if s.at("fst", "snd", "elim"):
            keyword = s.advance().text
            arg = self._parenthesized(s)
            return {"fst": Fst, "snd": Snd, "elim": Elim}[keyword](arg)
        if s.at("intro"):
            s.advance()
            s.expect("[")
            mu = self._mu_type(s)
            s.expect("]")
            return Intro(mu, self._parenthesized(s))
        s.expect("(")
        first = self._term(s)
        if s.at(","):
            s.advance()
            second = self._term(s)
            s.expect(")")
            return Pair(first, second)
        s.expect(")")
        return first


_parser = FPCParser()


def parse_fpc(text: str) -> FTerm:
    return _parser.parse(text)


def parse_fpc_type(text: str) -> FType:
    return _parser.parse_type(text)
