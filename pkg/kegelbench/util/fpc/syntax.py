"""
FPC: sums, products, functions and recursive types mu X. t.
Types, terms, capture-avoiding substitution at both levels, and the
typing judgement Theta | Gamma |- M : t.
"""

from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple, Union

from ..errors import TypeCheckError
from ..ppcf.syntax import fresh_name


# Types

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Sum:
    left: "FType"
    right: "FType"


@dataclass(frozen=True)
class Prod:
    left: "FType"
    right: "FType"


@dataclass(frozen=True)
class FArrow:
    domain: "FType"
    codomain: "FType"


@dataclass(frozen=True)
class Mu:
    binder: str
    body: "FType"


FType = Union[TVar, Sum, Prod, FArrow, Mu]
TypeCtx = Sequence[str]


def free_type_vars(t: FType) -> frozenset:
    match t:
        case TVar(name):
            return frozenset((name,))
        case Sum(a, b) | Prod(a, b) | FArrow(a, b):
            return free_type_vars(a) | free_type_vars(b)
        case Mu(x, body):
            return free_type_vars(body) - {x}
    raise TypeError(f"not an FPC type: {t!r}")


def wf_type(theta: TypeCtx, t: FType) -> bool:
    match t:
        case TVar(name):
            return name in theta
        case Sum(a, b) | Prod(a, b) | FArrow(a, b):
            return wf_type(theta, a) and wf_type(theta, b)
        case Mu(x, body):
            return wf_type(tuple(theta) + (x,), body)
    return False


def type_subst(t: FType, x: str, u: FType) -> FType:
    """Capture-avoiding t[x -> u]"""
    match t:
        case TVar(name):
            return u if name == x else t
        case Sum(a, b):
            return Sum(type_subst(a, x, u), type_subst(b, x, u))
        case Prod(a, b):
            return Prod(type_subst(a, x, u), type_subst(b, x, u))
        case FArrow(a, b):
            return FArrow(type_subst(a, x, u), type_subst(b, x, u))
        case Mu(y, body):
            if y == x or x not in free_type_vars(body):
                return t
            if y in free_type_vars(u):
                renamed = fresh_name(y, free_type_vars(u) | free_type_vars(body) | {x})
                body = type_subst(body, y, TVar(renamed))
                y = renamed
            return Mu(y, type_subst(body, x, u))
    raise TypeError(f"not an FPC type: {t!r}")


def unfold(t: Mu) -> FType:
    """body[X -> mu X. body]"""
    return type_subst(t.body, t.binder, t)


def type_key(t: FType, bound: Tuple[str, ...] = ()) -> tuple:
    match t:
        case TVar(name):
            return ("bv", bound.index(name)) if name in bound else ("fv", name)
        case Sum(a, b):
            return ("+", type_key(a, bound), type_key(b, bound))
        case Prod(a, b):
            return ("*", type_key(a, bound), type_key(b, bound))
        case FArrow(a, b):
            return ("->", type_key(a, bound), type_key(b, bound))
        case Mu(x, body):
            return ("mu", type_key(body, (x,) + bound))
    raise TypeError(f"not an FPC type: {t!r}")


def types_equal(t: FType, u: FType) -> bool:
    """Equality up to renaming of mu binders"""
    return type_key(t) == type_key(u)


_EMPTY_KEY = type_key(Mu("X", TVar("X")))
_ONE_KEY = ("->", _EMPTY_KEY, _EMPTY_KEY)


def _precedence(t: FType) -> int:
    if isinstance(t, TVar) or type_key(t) in (_EMPTY_KEY, _ONE_KEY):
        return 3
    match t:
        case Prod():
            return 2
        case Sum():
            return 1
    return 0


def _show_type(t: FType, level: int) -> str:
    text = pretty_type(t)
    return f"({text})" if _precedence(t) < level else text


def pretty_type(t: FType) -> str:
    # 0 and 1 print as their abbreviations
    key = type_key(t)
    if key == _EMPTY_KEY:
        return "0"
    if key == _ONE_KEY:
        return "1"
    match t:
        case TVar(name):
            return name
        case Mu(x, body):
            return f"mu {x}. {pretty_type(body)}"
        case FArrow(a, b):
            return f"{_show_type(a, 1)} -> {_show_type(b, 0)}"
        case Sum(a, b):
            return f"{_show_type(a, 1)} + {_show_type(b, 2)}"
        case Prod(a, b):
            return f"{_show_type(a, 2)} * {_show_type(b, 3)}"
    raise TypeError(f"not an FPC type: {t!r}")


# Terms

@dataclass(frozen=True)
class FVar:
    name: str


@dataclass(frozen=True)
class Inl:
    """inl into left + right; both summands are annotated"""

    left: FType
    right: FType
    body: "FTerm"


@dataclass(frozen=True)
class Inr:
    left: FType
    right: FType
    body: "FTerm"


@dataclass(frozen=True)
class Case:
    scrutinee: "FTerm"
    left_binder: str
    left_branch: "FTerm"
    right_binder: str
    right_branch: "FTerm"


@dataclass(frozen=True)
class Pair:
    first: "FTerm"
    second: "FTerm"


@dataclass(frozen=True)
class FLam:
    binder: str
    annotation: FType
    body: "FTerm"


@dataclass(frozen=True)
class FApp:
    fun: "FTerm"
    arg: "FTerm"


@dataclass(frozen=True)
class Fst:
    arg: "FTerm"


@dataclass(frozen=True)
class Snd:
    arg: "FTerm"


@dataclass(frozen=True)
class Intro:
    mu: Mu
    body: "FTerm"


@dataclass(frozen=True)
class Elim:
    arg: "FTerm"


FTerm = Union[FVar, Inl, Inr, Case, Pair, FLam, FApp, Fst, Snd, Intro, Elim]
TermCtx = Mapping[str, FType]


def free_vars(m: FTerm) -> frozenset:
    match m:
        case FVar(name):
            return frozenset((name,))
        case Inl(_, _, body) | Inr(_, _, body) | Intro(_, body):
            return free_vars(body)
        case Fst(arg) | Snd(arg) | Elim(arg):
            return free_vars(arg)
        case Pair(a, b) | FApp(a, b):
            return free_vars(a) | free_vars(b)
        case FLam(x, _, body):
            return free_vars(body) - {x}
        case Case(s, x, left, y, right):
            return free_vars(s) | (free_vars(left) - {x}) | (free_vars(right) - {y})
    raise TypeError(f"not an FPC term: {m!r}")


def _rebind(binder: str, body: FTerm, x: str, n: FTerm) -> Tuple[str, FTerm]:
    if x == binder:
        return binder, body
    n_free = free_vars(n)
    if binder in n_free and x in free_vars(body):
        renamed = fresh_name(binder, n_free | free_vars(body) | {x})
        body = subst(body, binder, FVar(renamed))
        binder = renamed
    return binder, subst(body, x, n)


def subst(m: FTerm, x: str, n: FTerm) -> FTerm:
    """Capture-avoiding m[x -> n]"""
    match m:
        case FVar(name):
            return n if name == x else m
        case Inl(t, u, body):
            return Inl(t, u, subst(body, x, n))
        case Inr(t, u, body):
            return Inr(t, u, subst(body, x, n))
        case Intro(mu, body):
            return Intro(mu, subst(body, x, n))
        case Fst(arg):
            return Fst(subst(arg, x, n))
        case Snd(arg):
            return Snd(subst(arg, x, n))
        case Elim(arg):
            return Elim(subst(arg, x, n))
        case Pair(a, b):
            return Pair(subst(a, x, n), subst(b, x, n))
        case FApp(a, b):
            return FApp(subst(a, x, n), subst(b, x, n))
        case FLam(y, t, body):
            y, body = _rebind(y, body, x, n)
            return FLam(y, t, body)
        case Case(s, y, left, z, right):
            y, left = _rebind(y, left, x, n)
            z, right = _rebind(z, right, x, n)
            return Case(subst(s, x, n), y, left, z, right)
    raise TypeError(f"not an FPC term: {m!r}")


def is_value(m: FTerm) -> bool:
    match m:
        case FLam():
            return True
        case Pair(a, b):
            return is_value(a) and is_value(b)
        case Inl(_, _, body) | Inr(_, _, body) | Intro(_, body):
            return is_value(body)
    return False


# Typing

def _sub(path: str, step: str) -> str:
    return f"{path}/{step}" if path else step


def _require_wf(theta: TypeCtx, t: FType, rule: str, path: str):
    if not wf_type(theta, t):
        raise TypeCheckError(rule, path, f"type {pretty_type(t)} is not well formed")


def typecheck_fpc(theta: TypeCtx, gamma: TermCtx, m: FTerm, path: str = "") -> FType:
    match m:
        case FVar(name):
            if name not in gamma:
                raise TypeCheckError("var", path, f"unbound variable {name}")
            return gamma[name]
        case FLam(x, t, body):
            _require_wf(theta, t, "lam", path)
            return FArrow(t, typecheck_fpc(theta, {**gamma, x: t}, body, _sub(path, "lam.body")))
        case FApp(fun, arg):
            tf = typecheck_fpc(theta, gamma, fun, _sub(path, "app.fun"))
            if not isinstance(tf, FArrow):
                raise TypeCheckError("app", path, f"applying a term of type {pretty_type(tf)}")
            ta = typecheck_fpc(theta, gamma, arg, _sub(path, "app.arg"))
            if not types_equal(ta, tf.domain):
                raise TypeCheckError(
                    "app", path, f"argument has type {pretty_type(ta)}, function expects {pretty_type(tf.domain)}"
                )
            return tf.codomain
        case Inl(t, u, body) | Inr(t, u, body):
            rule = "inl" if isinstance(m, Inl) else "inr"
            _require_wf(theta, t, rule, path)
            _require_wf(theta, u, rule, path)
            expected = t if rule == "inl" else u
            tb = typecheck_fpc(theta, gamma, body, _sub(path, rule))
            if not types_equal(tb, expected):
                raise TypeCheckError(rule, path, f"injected term has type {pretty_type(tb)}, not {pretty_type(expected)}")
            return Sum(t, u)
        case Case(s, x, left, y, right):
            ts = typecheck_fpc(theta, gamma, s, _sub(path, "case.scrutinee"))
            if not isinstance(ts, Sum):
                raise TypeCheckError("case", path, f"scrutinee has type {pretty_type(ts)}, not a sum")
            tl = typecheck_fpc(theta, {**gamma, x: ts.left}, left, _sub(path, "case.inl"))
            tr = typecheck_fpc(theta, {**gamma, y: ts.right}, right, _sub(path, "case.inr"))
            if not types_equal(tl, tr):
                raise TypeCheckError("case", path, f"branches disagree: {pretty_type(tl)} vs {pretty_type(tr)}")
            return tl
        case Pair(a, b):
            return Prod(
                typecheck_fpc(theta, gamma, a, _sub(path, "pair.fst")),
                typecheck_fpc(theta, gamma, b, _sub(path, "pair.snd")),
            )
        case Fst(arg) | Snd(arg):
            rule = "fst" if isinstance(m, Fst) else "snd"
            ta = typecheck_fpc(theta, gamma, arg, _sub(path, rule))
            if not isinstance(ta, Prod):
                raise TypeCheckError(rule, path, f"projecting from {pretty_type(ta)}, not a product")
            return ta.left if rule == "fst" else ta.right
        case Intro(mu, body):
            if not isinstance(mu, Mu):
                raise TypeCheckError("intro", path, f"intro needs a mu type, got {pretty_type(mu)}")
            _require_wf(theta, mu, "intro", path)
            expected = unfold(mu)
            tb = typecheck_fpc(theta, gamma, body, _sub(path, "intro"))
            if not types_equal(tb, expected):
                raise TypeCheckError("intro", path, f"body has type {pretty_type(tb)}, expected {pretty_type(expected)}")
            return mu
        case Elim(arg):
            ta = typecheck_fpc(theta, gamma, arg, _sub(path, "elim"))
            if not isinstance(ta, Mu):
                raise TypeCheckError("elim", path, f"eliminating a term of type {pretty_type(ta)}, not a mu type")
            return unfold(ta)
    raise TypeError(f"not an FPC term: {m!r}")


# Printing

def _atom(m: FTerm) -> str:
    text = pretty(m)
    if isinstance(m, (FLam, FApp)):
        return f"({text})"
    return text


def pretty(m: FTerm) -> str:
    match m:
        case FVar(name):
            return name
        case Inl(t, u, body):
            return f"inl[{pretty_type(t)}, {pretty_type(u)}]({pretty(body)})"
        case Inr(t, u, body):
            return f"inr[{pretty_type(t)}, {pretty_type(u)}]({pretty(body)})"
        case Case(s, x, left, y, right):
            return f"case {pretty(s)} of inl {x}. {pretty(left)} | inr {y}. {pretty(right)} end"
        case Pair(a, b):
            return f"({pretty(a)}, {pretty(b)})"
        case FLam(x, t, body):
            return f"\\{x}:{pretty_type(t)}. {pretty(body)}"
        case FApp(fun, arg):
            return f"({pretty(fun)}) {_atom(arg)}"
        case Fst(arg):
            return f"fst({pretty(arg)})"
        case Snd(arg):
            return f"snd({pretty(arg)})"
        case Intro(mu, body):
            return f"intro[{pretty_type(mu)}]({pretty(body)})"
        case Elim(arg):
            return f"elim({pretty(arg)})"
    raise TypeError(f"not an FPC term: {m!r}")
