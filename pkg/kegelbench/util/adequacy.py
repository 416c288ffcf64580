"""
Bridges between the operational and denotational semantics of pPCF:
one-step invariance, the k-step soundness corollary, computational adequacy
at a numeral, and the if-equation of the adequacy proof.
"""

import logging
from dataclasses import dataclass
from typing import List, Mapping, Sequence, Tuple

import sympy as sp

from .kegel import ONE, ZERO, SubDist, convex_combine, distance, format_prob, mass, to_rational
from .lib.request import AdequacyReport, DenoteConfig, Depths
from .ppcf.denotational import denote_nat
from .ppcf.operational import Branch, Det, WeakNormal, distribution, prob_numeral, step
from .ppcf.syntax import If, Num, PTerm, contains_fix, pretty, subst

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SoundnessCheck:
    """
    lhs is the denotation of the term, rhs the probability-weighted denotations
    of its successors. Fix-free terms must match exactly; otherwise the L1
    defect must stay within the slack left by unfinished Kleene iteration.
    """

    holds: bool
    exact: bool
    lhs: SubDist
    rhs: SubDist
    defect: sp.Rational
    slack: sp.Rational
    detail: str = ""


def _iteration_slack(m: PTerm, cfg: DenoteConfig, extra: int) -> sp.Rational:
    more = cfg.model_copy(update={"fix_iters": cfg.fix_iters + extra})
    return mass(denote_nat(m, more)) - mass(denote_nat(m, cfg))


def _compare(m: PTerm, lhs: SubDist, rhs: SubDist, cfg: DenoteConfig, extra: int) -> SoundnessCheck:
    defect = distance(lhs, rhs)
    if not contains_fix(m):
        holds = lhs == rhs
        detail = "" if holds else f"{pretty(m)}: {lhs} != {rhs}"
        return SoundnessCheck(holds, True, lhs, rhs, defect, ZERO, detail)
    slack = _iteration_slack(m, cfg, extra)
    holds = defect <= slack
    detail = "" if holds else f"{pretty(m)}: defect {defect} exceeds slack {slack}"
    return SoundnessCheck(holds, False, lhs, rhs, defect, slack, detail)


def check_invariance(m: PTerm, cfg: DenoteConfig) -> SoundnessCheck:
    """[[m]] against the kappa-weighted sum of [[m']] over the one-step successors"""
    lhs = denote_nat(m, cfg)
    match step(m):
        case WeakNormal():
            return SoundnessCheck(True, True, lhs, lhs, ZERO, ZERO, "weak-normal: nothing to compare")
        case Det(next_term):
            rhs = denote_nat(next_term, cfg)
        case Branch(kappa, heads, tails):
            rhs = convex_combine((kappa, ONE - kappa), (denote_nat(heads, cfg), denote_nat(tails, cfg)))
    result = _compare(m, lhs, rhs, cfg, 1)
    if not result.holds:
        logger.info("invariance failed: %s", result.detail)
    return result


def check_kstep(m: PTerm, k: int, cfg: DenoteConfig) -> SoundnessCheck:
    """[[m]] against the sum over the Prob^k row of m, pending terms included"""
    lhs = denote_nat(m, cfg)
    row = distribution(m, k).rows()
    rhs = convex_combine([w for _, w in row], [denote_nat(t, cfg) for t, _ in row])
    result = _compare(m, lhs, rhs, cfg, k)
    if not result.holds:
        logger.info("%d-step soundness failed: %s", k, result.detail)
    return result


def check_adequacy(m: PTerm, n: int, op_depth: int, cfg: DenoteConfig, tol) -> AdequacyReport:
    """
    Both sides are lower bounds of the same limit; the report states each of
    them and never claims which one is larger at a finite stage.
    """
    tol = to_rational(tol)
    op_lower = prob_numeral(m, n, op_depth)
    den_lower = denote_nat(m, cfg)[n]
    gap = abs(op_lower - den_lower)
    report = AdequacyReport(
        term=pretty(m),
        n=n,
        op_lower=format_prob(op_lower),
        den_lower=format_prob(den_lower),
        gap=format_prob(gap),
        depths=Depths(k=op_depth, D=cfg.fix_iters, C=cfg.support_cap),
        tol=format_prob(tol),
        passed=bool(gap <= tol),
    )
    logger.debug("adequacy %s at %d: op=%s den=%s", report.term, n, report.op_lower, report.den_lower)
    return report


@dataclass(frozen=True)
class IfEquationCheck:
    holds: bool
    lhs: sp.Rational
    rhs: sp.Rational
    slack: sp.Rational


def check_if_equation(scrutinee: PTerm, zero_branch: PTerm, z: str, succ_branch: PTerm, n: int, depth: int) -> IfEquationCheck:
    """
    Prob(if(M, P, z. Q), n) against Prob(M, 0) Prob(P, n) + sum_k Prob(M, k+1) Prob(Q[z -> k], n),
    all at the given depth. Every path counted on the right has at most
    2 * depth + 1 steps as a path of the if-term, so the gap is bounded by the
    mass the if-term gains between depth and 2 * depth + 1.
    """
    term = If(scrutinee, zero_branch, z, succ_branch)
    lhs = prob_numeral(term, n, depth)
    scrutinee_row = distribution(scrutinee, depth)
    rhs = ZERO
    for outcome, w in scrutinee_row.outcomes:
        if not isinstance(outcome, Num):
            continue
        if outcome.n == 0:
            rhs += w * prob_numeral(zero_branch, n, depth)
        else:
            rhs += w * prob_numeral(subst(succ_branch, z, Num(outcome.n - 1)), n, depth)
    slack = prob_numeral(term, n, 2 * depth + 1) - lhs
    return IfEquationCheck(bool(lhs <= rhs <= lhs + slack), lhs, rhs, slack)


def gap_schedule(m: PTerm, n: int, op_depth: int, fix_iters: int, rounds: int, support_cap: int) -> List[sp.Rational]:
    """Adequacy gaps at (2^i op_depth, 2^i fix_iters) for i < rounds"""
    gaps = []
    for i in range(rounds):
        cfg = DenoteConfig(fix_iters=fix_iters << i, support_cap=support_cap)
        report = check_adequacy(m, n, op_depth << i, cfg, ONE)
        gaps.append(report.gap_value)
    return gaps


def check_corpus(
    programs: Mapping[str, PTerm],
    numerals: Sequence[int],
    op_depth: int,
    cfg: DenoteConfig,
    tol,
) -> List[Tuple[str, AdequacyReport]]:
    """Adequacy reports for every program and numeral, ordered by term text"""
    reports = []
    for name, term in sorted(programs.items(), key=lambda item: pretty(item[1])):
        for n in numerals:
            reports.append((name, check_adequacy(term, n, op_depth, cfg, tol)))
    passed = sum(report.passed for _, report in reports)
    logger.info("corpus adequacy: %d/%d reports within tolerance", passed, len(reports))
    return reports
