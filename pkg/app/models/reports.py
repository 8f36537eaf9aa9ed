from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from config.config import settings


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


class ModelReport(BaseModel):
    holds: bool
    sentences_checked: int
    failing_index: Optional[int] = None
    failing_sentence: Optional[str] = None
    value: Optional[str] = None

    @property
    def status(self) -> CheckStatus:
        return CheckStatus.PASS if self.holds else CheckStatus.FAIL


class CauchyViolation(BaseModel):
    witness: int
    assignment: Dict[str, str]
    m: int
    k: int
    gap: str
    bound: str


class CauchyReport(BaseModel):
    status: CheckStatus
    witnesses_checked: int
    worst_pair: Optional[Tuple[int, int]] = None
    worst_gap: Optional[str] = None
    first_violation: Optional[CauchyViolation] = None


class EmbeddingReport(BaseModel):
    embedding: bool
    elementary: Optional[bool] = None
    depth_budget: int = 0
    formulas_checked: int = 0
    witness: Optional[Dict[str, Any]] = None


class LosViolation(BaseModel):
    formula: str
    elements: List[str]
    ultraproduct_value: str
    limit_value: str


class LosReport(BaseModel):
    status: CheckStatus
    formulas_checked: int
    tuples_checked: int
    first_violation: Optional[LosViolation] = None


class PseudometricViolation(BaseModel):
    axiom: str
    elements: List[str]
    values: Dict[str, str]


class PseudometricReport(BaseModel):
    status: CheckStatus
    triples_checked: int
    first_violation: Optional[PseudometricViolation] = None


class ModulusViolation(BaseModel):
    left: List[str]
    right: List[str]
    gap: str
    bound: str


class ModulusReport(BaseModel):
    predicate: str
    coefficient: str
    status: CheckStatus
    grid: Optional[int] = None
    pairs_checked: int = 0
    worst_ratio: Optional[str] = None
    worst_pair: Optional[Tuple[List[str], List[str]]] = None
    first_violation: Optional[ModulusViolation] = None


class UniformEquivalenceReport(BaseModel):
    status: CheckStatus
    zero_sets_equal: bool
    first_mismatch: Optional[List[str]] = None
    forward_modulus: List[Tuple[str, str]] = Field(default_factory=list)
    backward_modulus: List[Tuple[str, str]] = Field(default_factory=list)


class InterpretationViolation(BaseModel):
    condition: str
    predicate: str
    r: str
    s: str
    elements: List[str]


class InterpretationReport(BaseModel):
    status: CheckStatus
    conditions: Dict[str, CheckStatus]
    first_violation: Optional[InterpretationViolation] = None
    violations: Dict[str, InterpretationViolation] = Field(default_factory=dict)


class CommandReport(BaseModel):
    """The single document every command-line run emits."""
    schema_version: int = Field(default=settings.REPORT_SCHEMA_VERSION, serialization_alias="schema")
    command: str
    status: CheckStatus
    witnesses: List[Dict[str, Any]] = Field(default_factory=list)
    values: Dict[str, Any] = Field(default_factory=dict)
