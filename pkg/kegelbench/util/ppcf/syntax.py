"""
pPCF abstract syntax: types, terms, typing, substitution and derived forms
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Optional, Tuple, Union

import sympy as sp

from ..errors import TypeCheckError
from ..kegel import Prob, format_prob


# Types

@dataclass(frozen=True)
class Nat:
    pass


@dataclass(frozen=True)
class Arrow:
    domain: "PType"
    codomain: "PType"


PType = Union[Nat, Arrow]
NAT = Nat()


def arrow(*types: PType) -> PType:
    """arrow(a, b, c) is a -> (b -> c)"""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def pretty_type(t: PType) -> str:
    match t:
        case Nat():
            return "nat"
        case Arrow(Arrow() as dom, cod):
            return f"({pretty_type(dom)}) -> {pretty_type(cod)}"
        case Arrow(dom, cod):
            return f"{pretty_type(dom)} -> {pretty_type(cod)}"
    raise TypeError(f"not a pPCF type: {t!r}")


# Terms

class _Term:
    @cached_property
    def free_vars(self) -> frozenset:
        return _free_vars(self)


@dataclass(frozen=True)
class Num(_Term):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"numerals are natural numbers, got {self.n}")


@dataclass(frozen=True)
class Var(_Term):
    name: str


@dataclass(frozen=True)
class Succ(_Term):
    arg: "PTerm"


@dataclass(frozen=True)
class If(_Term):
    scrutinee: "PTerm"
    zero_branch: "PTerm"
    binder: str
    succ_branch: "PTerm"


@dataclass(frozen=True)
class Lam(_Term):
    binder: str
    annotation: PType
    body: "PTerm"


@dataclass(frozen=True)
class App(_Term):
    fun: "PTerm"
    arg: "PTerm"


@dataclass(frozen=True)
class Coin(_Term):
    kappa: sp.Rational

    def __post_init__(self):
        object.__setattr__(self, "kappa", Prob(self.kappa).value)


@dataclass(frozen=True)
class Fix(_Term):
    body: "PTerm"


PTerm = Union[Num, Var, Succ, If, Lam, App, Coin, Fix]
TypingCtx = Mapping[str, PType]


def is_weak_normal(m: PTerm) -> bool:
    return isinstance(m, (Num, Lam))


def _free_vars(m: PTerm) -> frozenset:
    match m:
        case Num() | Coin():
            return frozenset()
        case Var(name):
            return frozenset((name,))
        case Succ(arg):
            return arg.free_vars
        case Fix(body):
            return body.free_vars
        case App(fun, arg):
            return fun.free_vars | arg.free_vars
        case Lam(x, _, body):
            return body.free_vars - {x}
        case If(s, p, z, q):
            return s.free_vars | p.free_vars | (q.free_vars - {z})
    raise TypeError(f"not a pPCF term: {m!r}")


def free_vars(m: PTerm) -> frozenset:
    return m.free_vars


def fresh_name(base: str, avoid) -> str:
    candidate = base
    while candidate in avoid:
        candidate += "'"
    return candidate


def _rebind(binder: str, body: PTerm, x: str, n: PTerm) -> Tuple[str, PTerm]:
    """Push [x -> n] under a binder, renaming it if n would be captured"""
    if binder in n.free_vars and x in body.free_vars:
        renamed = fresh_name(binder, n.free_vars | body.free_vars | {x})
        body = subst(body, binder, Var(renamed))
        binder = renamed
    return binder, subst(body, x, n)


def subst(m: PTerm, x: str, n: PTerm) -> PTerm:
    """Capture-avoiding m[x -> n]"""
    if x not in m.free_vars:
        return m
    match m:
        case Var():
            return n
        case Succ(arg):
            return Succ(subst(arg, x, n))
        case Fix(body):
            return Fix(subst(body, x, n))
        case App(fun, arg):
            return App(subst(fun, x, n), subst(arg, x, n))
        case Lam(y, t, body):
            y, body = _rebind(y, body, x, n)
            return Lam(y, t, body)
        case If(s, p, z, q):
            s, p = subst(s, x, n), subst(p, x, n)
            if z == x:
                return If(s, p, z, q)
            z, q = _rebind(z, q, x, n)
            return If(s, p, z, q)
    return m


def alpha_key(m: PTerm, bound: Tuple[str, ...] = ()) -> tuple:
    """Hashable de Bruijn form; alpha-equivalent terms get equal keys"""
    match m:
        case Num(n):
            return ("num", n)
        case Var(name):
            if name in bound:
                return ("bv", bound.index(name))
            return ("fv", name)
        case Coin(kappa):
            return ("coin", int(kappa.p), int(kappa.q))
        case Succ(arg):
            return ("succ", alpha_key(arg, bound))
        case Fix(body):
            return ("fix", alpha_key(body, bound))
        case App(fun, arg):
            return ("app", alpha_key(fun, bound), alpha_key(arg, bound))
        case Lam(y, t, body):
            return ("lam", t, alpha_key(body, (y,) + bound))
        case If(s, p, z, q):
            return ("if", alpha_key(s, bound), alpha_key(p, bound), alpha_key(q, (z,) + bound))
    raise TypeError(f"not a pPCF term: {m!r}")


def alpha_equivalent(m: PTerm, n: PTerm) -> bool:
    return alpha_key(m) == alpha_key(n)


def _sub(path: str, step: str) -> str:
    return f"{path}/{step}" if path else step


def typecheck(ctx: TypingCtx, m: PTerm, path: str = "") -> PType:
    """The unique type of m under ctx, by the eight syntax-directed rules"""
    match m:
        case Num():
            return NAT
        case Coin():
            return NAT
        case Var(name):
            if name not in ctx:
                raise TypeCheckError("var", path, f"unbound variable {name}")
            return ctx[name]
        case Succ(arg):
            t = typecheck(ctx, arg, _sub(path, "succ"))
            if t != NAT:
                raise TypeCheckError("succ", path, f"argument has type {pretty_type(t)}, not nat")
            return NAT
        case If(s, p, z, q):
            ts = typecheck(ctx, s, _sub(path, "if.scrutinee"))
            if ts != NAT:
                raise TypeCheckError("if", path, f"scrutinee has type {pretty_type(ts)}, not nat")
            tp = typecheck(ctx, p, _sub(path, "if.zero"))
            tq = typecheck({**ctx, z: NAT}, q, _sub(path, "if.succ"))
            if tp != tq:
                raise TypeCheckError("if", path, f"branches disagree: {pretty_type(tp)} vs {pretty_type(tq)}")
            return tp
        case Lam(x, t, body):
            return Arrow(t, typecheck({**ctx, x: t}, body, _sub(path, "lam.body")))
        case App(fun, arg):
            tf = typecheck(ctx, fun, _sub(path, "app.fun"))
            if not isinstance(tf, Arrow):
                raise TypeCheckError("app", path, f"applying a term of type {pretty_type(tf)}")
            ta = typecheck(ctx, arg, _sub(path, "app.arg"))
            if ta != tf.domain:
                raise TypeCheckError(
                    "app", path, f"argument has type {pretty_type(ta)}, function expects {pretty_type(tf.domain)}"
                )
            return tf.codomain
        case Fix(body):
            tb = typecheck(ctx, body, _sub(path, "fix"))
            if not isinstance(tb, Arrow) or tb.domain != tb.codomain:
                raise TypeCheckError("fix", path, f"fix needs t -> t, got {pretty_type(tb)}")
            return tb.domain
    raise TypeError(f"not a pPCF term: {m!r}")


# Derived forms

def desugar_pred() -> PTerm:
    """The combinator \\x:nat. if(x, 0, z. z); pred(M) is its application to M"""
    return Lam("x", NAT, If(Var("x"), Num(0), "z", Var("z")))


def desugar_choice(m: PTerm, kappa, n: PTerm) -> PTerm:
    z = fresh_name("z", n.free_vars)
    return If(Coin(kappa), m, z, n)


def desugar_let(x: str, m: PTerm, n: PTerm) -> PTerm:
    z = fresh_name("z", n.free_vars | {x})
    return If(m, subst(n, x, Num(0)), z, subst(n, x, Succ(Var(z))))


def numeral_value(m: PTerm) -> Optional[int]:
    return m.n if isinstance(m, Num) else None


# Printing

def _atom(m: PTerm) -> str:
    text = pretty(m)
    if isinstance(m, (Lam, App)):
        return f"({text})"
    return text


def pretty(m: PTerm) -> str:
    match m:
        case Num(n):
            return str(n)
        case Var(name):
            return name
        case Coin(kappa):
            return f"coin({format_prob(kappa)})"
        case Succ(arg):
            return f"succ({pretty(arg)})"
        case Fix(body):
            return f"fix({pretty(body)})"
        case If(s, p, z, q):
            return f"if({pretty(s)}, {pretty(p)}, {z}. {pretty(q)})"
        case Lam(x, t, body):
            return f"\\{x}:{pretty_type(t)}. {pretty(body)}"
        case App(fun, arg):
            return f"({pretty(fun)}) {_atom(arg)}"
    raise TypeError(f"not a pPCF term: {m!r}")


def contains_fix(m: PTerm) -> bool:
    match m:
        case Fix():
            return True
        case Num() | Var() | Coin():
            return False
        case Succ(arg):
            return contains_fix(arg)
        case Lam(_, _, body):
            return contains_fix(body)
        case App(fun, arg):
            return contains_fix(fun) or contains_fix(arg)
        case If(s, p, _, q):
            return contains_fix(s) or contains_fix(p) or contains_fix(q)
    raise TypeError(f"not a pPCF term: {m!r}")
