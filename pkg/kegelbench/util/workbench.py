"""
Workbench Engine
Loads .ppcf and .fpc programs and runs every workbench command on them
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .adequacy import check_adequacy, check_corpus
from .errors import KegelError, TypeMismatch
from .fpc.parser import parse_fpc
from .fpc.reduction import Normal, normalize
from .fpc.syntax import FTerm, pretty_type as pretty_fpc_type, pretty as pretty_fpc, typecheck_fpc
from .kegel import format_prob
from .lib.request import (
    AdequacyReport,
    CheckResponse,
    DenoteConfig,
    DenoteResponse,
    NormalizeResponse,
    SampleHistogram,
    SampleResponse,
    SubDistModel,
    TermDistModel,
)
from .ppcf.denotational import denote_with_ledger, observe
from .ppcf.operational import Timeout, distribution, reduction_trace, run_sample, sample_frequencies
from .ppcf.parser import parse
from .ppcf.syntax import NAT, PTerm, pretty, pretty_type, typecheck

logger = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
CORPUS_NUMERALS = tuple(range(6))


@dataclass(frozen=True)
class Program:
    path: str
    language: str
    term: Union[PTerm, FTerm]


def language_of(path: str) -> str:
    return "fpc" if Path(path).suffix == ".fpc" else "ppcf"


class WorkbenchEngine:
    """
    Every command returns (success, payload, error_message). OSError from
    reading a program is left to the caller; every KegelError becomes a
    failed tuple.
    """

    def load(self, path: str) -> Program:
        text = Path(path).read_text(encoding="utf-8")
        language = language_of(path)
        term = parse_fpc(text) if language == "fpc" else parse(text)
        logger.info("loaded %s program %s", language, path)
        return Program(path, language, term)

    def _load_nat(self, path: str) -> PTerm:
        program = self.load(path)
        if program.language != "ppcf":
            raise TypeMismatch(f"{path} is not a pPCF program")
        t = typecheck({}, program.term)
        if t != NAT:
            raise TypeMismatch("program type", "nat", pretty_type(t))
        return program.term

    def check(self, path: str) -> Tuple[bool, CheckResponse, Optional[str]]:
        language = language_of(path)
        try:
            program = self.load(path)
            if language == "fpc":
                rendered = pretty_fpc_type(typecheck_fpc((), {}, program.term))
            else:
                rendered = pretty_type(typecheck({}, program.term))
            return True, CheckResponse(path=path, language=language, success=True, type=rendered), None
        except KegelError as e:
            return False, CheckResponse(path=path, language=language, success=False, error=str(e)), str(e)

    def run(self, path: str, seed: int, max_steps: int) -> Tuple[bool, Optional[SampleResponse], Optional[str]]:
        try:
            term = self._load_closed(path)
            result = run_sample(term, seed, max_steps)
            response = SampleResponse(
                seed=seed, outcome=pretty(result.term), steps=result.steps, timeout=isinstance(result, Timeout)
            )
            return True, response, None
        except KegelError as e:
            return False, None, str(e)

    def trace(self, path: str, seed: int, max_steps: int) -> Tuple[bool, List[str], Optional[str]]:
        try:
            term = self._load_closed(path)
            return True, [pretty(t) for t in reduction_trace(term, seed, max_steps)], None
        except KegelError as e:
            return False, [], str(e)

    def sample(self, path: str, seed: int, runs: int, max_steps: int) -> Tuple[bool, Optional[SampleHistogram], Optional[str]]:
        try:
            term = self._load_closed(path)
            summary = sample_frequencies(term, seed, runs, max_steps)
            histogram = SampleHistogram(
                seed=seed,
                runs=summary.runs,
                numerals={str(n): count for n, count in summary.numerals.items()},
                other_values=summary.other_values,
                timeouts=summary.timeouts,
            )
            return True, histogram, None
        except KegelError as e:
            return False, None, str(e)

    def _load_closed(self, path: str) -> PTerm:
        program = self.load(path)
        if program.language != "ppcf":
            raise TypeMismatch(f"{path} is not a pPCF program")
        typecheck({}, program.term)
        return program.term

    def dist(self, path: str, op_depth: int) -> Tuple[bool, Optional[TermDistModel], Optional[str]]:
        try:
            term = self._load_nat(path)
            td = distribution(term, op_depth)
            outcomes: Dict[str, str] = {pretty(t): format_prob(w) for t, w in td.outcomes}
            return True, TermDistModel(outcomes=outcomes, residual=format_prob(td.residual)), None
        except KegelError as e:
            return False, None, str(e)

    def denote(self, path: str, cfg: DenoteConfig) -> Tuple[bool, Optional[DenoteResponse], Optional[str]]:
        try:
            term = self._load_nat(path)
            denotation = denote_with_ledger({}, term, cfg)
            d = observe(denotation.value)
            response = DenoteResponse(
                **SubDistModel.from_dist(d).model_dump(),
                discarded_mass=format_prob(denotation.discarded),
            )
            return True, response, None
        except KegelError as e:
            return False, None, str(e)

    def adequacy(
        self, path: str, n: int, op_depth: int, cfg: DenoteConfig, tol
    ) -> Tuple[bool, Optional[AdequacyReport], Optional[str]]:
        try:
            term = self._load_nat(path)
            report = check_adequacy(term, n, op_depth, cfg, tol)
            logger.info("adequacy at %d: gap %s, passed=%s", n, report.gap, report.passed)
            return True, report, None
        except KegelError as e:
            return False, None, str(e)

    def fpc_check(self, path: str) -> Tuple[bool, CheckResponse, Optional[str]]:
        if language_of(path) != "fpc":
            message = f"{path} is not an FPC program"
            return False, CheckResponse(path=path, language="ppcf", success=False, error=message), message
        return self.check(path)

    def fpc_run(self, path: str, fuel: int) -> Tuple[bool, Optional[NormalizeResponse], Optional[str]]:
        try:
            program = self.load(path)
            if program.language != "fpc":
                raise TypeMismatch(f"{path} is not an FPC program")
            t = typecheck_fpc((), {}, program.term)
            result = normalize(program.term, fuel)
            response = NormalizeResponse(
                normal=isinstance(result, Normal), term=pretty_fpc(result.term), type=pretty_fpc_type(t)
            )
            return True, response, None
        except KegelError as e:
            return False, None, str(e)

    def corpus(
        self, op_depth: int, cfg: DenoteConfig, tol, directory: Path = CORPUS_DIR
    ) -> Tuple[bool, List[AdequacyReport], Optional[str]]:
        """Adequacy over every bundled nat program, numerals 0 to 5"""
        try:
            programs = {}
            for path in sorted(directory.glob("*.ppcf")):
                programs[path.name] = self._load_nat(str(path))
            logger.info("corpus: %d programs from %s", len(programs), directory)
            reports = [report for _, report in check_corpus(programs, CORPUS_NUMERALS, op_depth, cfg, tol)]
            return True, reports, None
        except KegelError as e:
            return False, [], str(e)
