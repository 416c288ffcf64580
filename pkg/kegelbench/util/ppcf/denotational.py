"""
Denotational semantics of pPCF over sub-distributions.

Ground values are SubDists over the naturals; function values are opaque
closures. fix(f) is approximated by the finite Kleene iterate f^D(bottom), and
every ground value is truncated at the support cap (dropped mass is lost,
so results are lower bounds).
"""

import logging
import sys
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Sequence, Tuple, Union

import sympy as sp

from ..errors import TypeCheckError, TypeMismatch
from ..kegel import EMPTY, ONE, ZERO, SubDist, convex_combine, dirac, shift, truncate
from ..lib.request import DenoteConfig
from .syntax import NAT, App, Arrow, Coin, Fix, If, Lam, Nat, Num, PTerm, PType, Succ, Var, pretty_type, typecheck

logger = logging.getLogger(__name__)

# f^D(bottom) nests D closure calls
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))


@dataclass(frozen=True)
class NatDist:
    dist: SubDist


@dataclass(frozen=True, eq=False)
class SemFun:
    apply: Callable[["SemValue"], "SemValue"]
    type_tag: Arrow


SemValue = Union[NatDist, SemFun]
SemEnv = Mapping[str, SemValue]


def type_of(v: SemValue) -> PType:
    if isinstance(v, NatDist):
        return NAT
    return v.type_tag


def observe(v: SemValue) -> SubDist:
    if not isinstance(v, NatDist):
        raise TypeMismatch("only ground values can be observed", "nat", pretty_type(type_of(v)))
    return v.dist


def memoized(fn: Callable[[SemValue], SemValue]) -> Callable[[SemValue], SemValue]:
    table: Dict[SemValue, SemValue] = {}

    def apply(arg: SemValue) -> SemValue:
        hit = table.get(arg)
        if hit is None:
            hit = table[arg] = fn(arg)
        return hit

    return apply


def bottom(t: PType) -> SemValue:
    match t:
        case Nat():
            return NatDist(EMPTY)
        case Arrow(_, cod):
            least = bottom(cod)
            return SemFun(lambda _: least, t)
    raise TypeMismatch(f"not a pPCF type: {t!r}")


def apply_sem(f: SemValue, v: SemValue) -> SemValue:
    if not isinstance(f, SemFun):
        raise TypeMismatch("applying a ground value", "a function", "nat")
    if type_of(v) != f.type_tag.domain:
        raise TypeMismatch("argument type", pretty_type(f.type_tag.domain), pretty_type(type_of(v)))
    return f.apply(v)


def fix_iterate(f: SemValue, iters: int) -> SemValue:
    """f applied iters times to bottom; ground observations grow with iters"""
    if not isinstance(f, SemFun) or f.type_tag.domain != f.type_tag.codomain:
        raise TypeMismatch("fix needs an endomap", "t -> t", pretty_type(type_of(f)))
    value = bottom(f.type_tag.domain)
    for _ in range(iters):
        value = f.apply(value)
    return value


def fix_converge(f: SemValue, iters: int) -> SemValue:
    """
    Like fix_iterate, but a fix at type nat stops as soon as two successive
    iterates agree, since the chain is then constant. Function-typed fixes
    always take all iters steps: agreement at the arguments seen so far says
    nothing about the others.
    """
    if not isinstance(f, SemFun) or f.type_tag.domain != f.type_tag.codomain:
        raise TypeMismatch("fix needs an endomap", "t -> t", pretty_type(type_of(f)))
    if not isinstance(f.type_tag.domain, Nat):
        return fix_iterate(f, iters)
    previous = bottom(NAT)
    for k in range(1, iters + 1):
        current = f.apply(previous)
        if current == previous:
            logger.debug("fix converged after %d iterations", k)
            return current
        previous = current
    return previous


Compiled = Callable[[Dict[str, SemValue]], SemValue]


class Denoter:
    """Compiles a typed term once into closures over environments, then runs them"""

    def __init__(self, cfg: DenoteConfig, capped: bool = True):
        self.cfg = cfg
        self.capped = capped
        self.truncated = False

    def nat(self, d: SubDist) -> NatDist:
        if not self.capped:
            return NatDist(d)
        kept = truncate(d, self.cfg.support_cap)
        if kept is not d:
            self.truncated = True
            logger.debug("truncated %s of mass above index %d", d.mass - kept.mass, self.cfg.support_cap)
        return NatDist(kept)

    def combine(self, weights: Sequence[sp.Rational], values: Sequence[SemValue], t: PType) -> SemValue:
        """Convex combination at any type; pointwise at function types"""
        if isinstance(t, Nat):
            return self.nat(convex_combine(weights, [observe(v) for v in values]))
        return SemFun(
            memoized(lambda x: self.combine(weights, [v.apply(x) for v in values], t.codomain)), t
        )

    def fix(self, f: SemValue) -> SemValue:
        if self.cfg.converge:
            return fix_converge(f, self.cfg.fix_iters)
        return fix_iterate(f, self.cfg.fix_iters)

    def compile(self, m: PTerm, ctx: Dict[str, PType]) -> Tuple[Compiled, PType]:
        match m:
            case Num(n):
                value = self.nat(dirac(n))
                return (lambda env: value), NAT
            case Coin(kappa):
                value = self.nat(convex_combine((kappa, ONE - kappa), (dirac(0), dirac(1))))
                return (lambda env: value), NAT
            case Var(name):
                return (lambda env: env[name]), ctx[name]
            case Succ(arg):
                run_arg, _ = self.compile(arg, ctx)
                return (lambda env: self.nat(shift(observe(run_arg(env))))), NAT
            case If(s, p, z, q):
                return self._compile_if(s, p, z, q, ctx)
            case Lam(x, t, body):
                run_body, tb = self.compile(body, {**ctx, x: t})
                tag = Arrow(t, tb)
                return (lambda env: SemFun(memoized(lambda arg: run_body({**env, x: arg})), tag)), tag
            case App(fun, arg):
                run_fun, tf = self.compile(fun, ctx)
                run_arg, _ = self.compile(arg, ctx)
                return (lambda env: apply_sem(run_fun(env), run_arg(env))), tf.codomain
            case Fix(body):
                run_body, tb = self.compile(body, ctx)
                return (lambda env: self.fix(run_body(env))), tb.domain
        raise TypeMismatch(f"not a pPCF term: {m!r}")

    def _compile_if(self, s, p, z, q, ctx) -> Tuple[Compiled, PType]:
        run_s, _ = self.compile(s, ctx)
        run_p, t = self.compile(p, ctx)
        run_q, _ = self.compile(q, {**ctx, z: NAT})

        # v(0) on the zero branch, v(k+1) on the successor branch with z bound to dirac(k)
        def run(env):
            v = observe(run_s(env))
            weights, values = [], []
            for index, w in v.weights:
                weights.append(w)
                if index == 0:
                    values.append(run_p(env))
                else:
                    values.append(run_q({**env, z: NatDist(dirac(index - 1))}))
            return self.combine(weights, values, t)

        return run, t


@dataclass(frozen=True)
class Denotation:
    value: SemValue
    discarded: sp.Rational


def denote_with_ledger(env: SemEnv, m: PTerm, cfg: DenoteConfig) -> Denotation:
    ctx = {name: type_of(v) for name, v in env.items()}
    try:
        typecheck(ctx, m)
    except TypeCheckError as exc:
        raise TypeMismatch(f"environment disagrees with the term's typing: {exc}") from exc
    denoter = Denoter(cfg)
    run, _ = denoter.compile(m, ctx)
    value = run(dict(env))
    discarded = ZERO
    # measured against the same run without the support cap; ground results only
    if denoter.truncated and isinstance(value, NatDist):
        uncapped = Denoter(cfg, capped=False)
        run_uncapped, _ = uncapped.compile(m, ctx)
        discarded = observe(run_uncapped(dict(env))).mass - value.dist.mass
    return Denotation(value, discarded)


def denote(env: SemEnv, m: PTerm, cfg: DenoteConfig) -> SemValue:
    return denote_with_ledger(env, m, cfg).value


def denote_nat(m: PTerm, cfg: DenoteConfig) -> SubDist:
    """Denotation of a closed program of type nat"""
    return observe(denote({}, m, cfg))
