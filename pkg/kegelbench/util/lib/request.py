from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Dict, List, Literal, Optional

import sympy as sp

from ..errors import KegelError
from ..kegel import SubDist, format_prob, parse_prob, sub_dist, to_rational
from ..lawvere import StochMatrix, from_rows

DEFAULT_OP_DEPTH = 200
DEFAULT_FIX_ITERS = 60
DEFAULT_SUPPORT_CAP = 64
DEFAULT_TOL = format_prob(sp.Rational(1, 2**40))


class DenoteConfig(BaseModel):
    """Finite approximation policy for the denotational semantics"""
    model_config = ConfigDict(frozen=True)

    fix_iters: int = Field(default=DEFAULT_FIX_ITERS, ge=0, description="Kleene iteration depth D for every fix")
    support_cap: int = Field(default=DEFAULT_SUPPORT_CAP, ge=0, description="Largest numeral index C kept in a ground value")
    converge: bool = Field(default=False, description="Stop a fix at type nat early once two successive iterates agree")


class RunConfig(BaseModel):
    """Everything one CLI invocation needs"""
    command: Literal["check", "run", "dist", "denote", "adequacy", "fpc-check", "fpc-run", "corpus"]
    path: Optional[str] = Field(None, description="Program file (.ppcf or .fpc)")
    op_depth: int = Field(default=DEFAULT_OP_DEPTH, ge=0, description="Number of reduction steps k for Prob^k")
    fix_iters: int = Field(default=DEFAULT_FIX_ITERS, ge=0, description="Kleene iteration depth D")
    support_cap: int = Field(default=DEFAULT_SUPPORT_CAP, ge=0, description="Support cap C")
    seed: int = Field(default=0, ge=0, lt=2**64, description="PCG64 seed for sampling")
    tol: str = Field(default=DEFAULT_TOL, description="Adequacy tolerance as p/q in [0, 1]")
    output_format: Literal["json", "text"] = Field(default="json", alias="format")
    numeral: int = Field(default=0, ge=0, description="Numeral n observed by the adequacy check")
    samples: int = Field(default=0, ge=0, description="Number of seeded runs; 0 prints a single run")
    max_steps: int = Field(default=10_000, ge=0, description="Step budget of a sampled run")
    trace: bool = Field(default=False, description="Report every term visited by one seeded run")
    fuel: int = Field(default=1000, ge=0, description="Step budget for FPC normalization")
    converge: bool = False
    verbose: bool = False

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("tol")
    @classmethod
    def _canonical_tol(cls, value: str) -> str:
        try:
            return format_prob(parse_prob(value))
        except KegelError as exc:
            raise ValueError(str(exc)) from exc

    @property
    def tolerance(self) -> sp.Rational:
        return to_rational(self.tol)

    def denote_config(self) -> DenoteConfig:
        return DenoteConfig(fix_iters=self.fix_iters, support_cap=self.support_cap, converge=self.converge)


class SubDistModel(BaseModel):
    mass: str
    weights: Dict[str, str]

    @classmethod
    def from_dist(cls, d: SubDist) -> "SubDistModel":
        return cls(mass=format_prob(d.mass), weights={str(i): format_prob(w) for i, w in d.weights})

    def to_dist(self) -> SubDist:
        return sub_dist({int(i): to_rational(w) for i, w in self.weights.items()})


class MatrixModel(BaseModel):
    rows: int
    cols: int
    entries: List[List[str]]

    @classmethod
    def from_matrix(cls, a: StochMatrix) -> "MatrixModel":
        return cls(rows=a.rows, cols=a.cols, entries=[[format_prob(v) for v in row] for row in a.to_rows()])

    def to_matrix(self) -> StochMatrix:
        return from_rows([[to_rational(v) for v in row] for row in self.entries], self.cols)


class TermDistModel(BaseModel):
    outcomes: Dict[str, str]
    residual: str


class DenoteResponse(SubDistModel):
    model_config = ConfigDict(populate_by_name=True)

    discarded_mass: str = Field(..., alias="discardedMass")


class Depths(BaseModel):
    k: int
    D: int
    C: int


class AdequacyReport(BaseModel):
    """Both finite-stage lower bounds for one numeral, and their distance"""
    model_config = ConfigDict(populate_by_name=True)

    term: str
    n: int
    op_lower: str = Field(..., alias="opLower")
    den_lower: str = Field(..., alias="denLower")
    gap: str
    depths: Depths
    tol: str
    passed: bool

    @property
    def gap_value(self) -> sp.Rational:
        return to_rational(self.gap)


class CheckResponse(BaseModel):
    path: str
    language: Literal["ppcf", "fpc"]
    success: bool
    type: Optional[str] = None
    error: Optional[str] = None


class SampleResponse(BaseModel):
    seed: int
    outcome: str
    steps: int
    timeout: bool


class SampleHistogram(BaseModel):
    seed: int
    runs: int
    numerals: Dict[str, int]
    other_values: int
    timeouts: int


class NormalizeResponse(BaseModel):
    normal: bool
    term: str
    type: str
