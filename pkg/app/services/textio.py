"""
Reading and writing the s-expression text formats.

Every document is one parenthesized expression. Comments run from `;` to the
end of the line. Element literals inside formulas are written `#label`.
Diagnostics carry a DiagnosticCode and the line and column where they arose.
"""
import logging
import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.core.kernel import BASIS, TruthValue, format_rational, is_rational_literal, parse_rational
from app.models.interpretation import Interpretation, PositiveFormula, frame_variables, is_positive
from app.models.structure import GeneralStructure
from app.models.syntax import (
    QUANTIFIER_KINDS,
    Apply,
    Atom,
    Conn,
    Const,
    Elem,
    Formula,
    FormulaSequence,
    Quant,
    Term,
    Theory,
    Var,
    alpha_normalize,
    constant,
    schedule_from_text,
)
from app.models.vocabulary import BOUND_NAME_PATTERN, NAME_PATTERN, RESERVED_WORDS, Vocabulary
from app.utils.error_handling import (
    AppError,
    DiagnosticCode,
    ParseError,
    StructuralError,
    StructureError,
)
from config.config import settings

# Configure logging
logger = logging.getLogger(__name__)

Location = Tuple[int, int]


# ---------------------------------------------------------------------------
# Reader
# ---------------------------------------------------------------------------

class SAtom:
    def __init__(self, text: str, loc: Location = (0, 0)):
        self.text = text
        self.loc = loc

    def __repr__(self):
        return self.text


class SList:
    def __init__(self, children: List["SNode"], loc: Location = (0, 0)):
        self.children = children
        self.loc = loc

    def __repr__(self):
        return "({})".format(" ".join(map(repr, self.children)))

    def __len__(self):
        return len(self.children)

    def __getitem__(self, i):
        return self.children[i]

    @property
    def head(self) -> Optional[str]:
        if self.children and isinstance(self.children[0], SAtom):
            return self.children[0].text
        return None


SNode = Union[SAtom, SList]

_WS = re.compile(r"\s+")
_LPAREN = re.compile(r"\(")
_RPAREN = re.compile(r"\)")
_COMMENT = re.compile(r";[^\n]*")
_TOKEN = re.compile(r"[^\s();]+")


class Input:
    """Cursor over the source text that tracks line and column."""

    def __init__(self, s: str):
        self.string = s
        self.index = 0
        self.line = 1
        self.column = 1

    def matches(self, r) -> bool:
        return r.match(self.string, self.index) is not None

    def consume(self, r) -> str:
        m = r.match(self.string, self.index)
        consumed = m.group()
        self.index += len(consumed)
        lines = consumed.count("\n")
        if lines > 0:
            self.line += lines
            self.column = len(consumed) - consumed.rfind("\n")
        else:
            self.column += len(consumed)
        return consumed

    def loc(self) -> Location:
        return (self.line, self.column)

    def eof(self) -> bool:
        return self.index == len(self.string)


def _read_items(stream: Input) -> List[SNode]:
    items: List[SNode] = []
    while True:
        if stream.matches(_LPAREN):
            start = stream.loc()
            stream.consume(_LPAREN)
            children = _read_items(stream)
            if not stream.matches(_RPAREN):
                raise ParseError(DiagnosticCode.UNBALANCED_PARENTHESES, "missing )", *start)
            stream.consume(_RPAREN)
            items.append(SList(children, start))
        elif stream.matches(_TOKEN):
            loc = stream.loc()
            items.append(SAtom(stream.consume(_TOKEN), loc))
        elif stream.matches(_COMMENT):
            stream.consume(_COMMENT)
        elif stream.matches(_WS):
            stream.consume(_WS)
        else:
            return items


def read_sexprs(text: str) -> List[SNode]:
    """Read every top-level expression of the text."""
    stream = Input(text)
    items = _read_items(stream)
    if not stream.eof():
        raise ParseError(DiagnosticCode.UNBALANCED_PARENTHESES, "unexpected )", *stream.loc())
    return items


def read_one(text: str, what: str) -> SNode:
    items = read_sexprs(text)
    if len(items) != 1:
        loc = items[1].loc if len(items) > 1 else (1, 1)
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected exactly one {what}, found {len(items)}", *loc)
    return items[0]


def _expect_list(node: SNode, what: str, head: Optional[str] = None) -> SList:
    if not isinstance(node, SList) or (head is not None and node.head != head):
        expected = f"({head} ...)" if head else f"a parenthesized {what}"
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected {expected}", *node.loc)
    return node


def _expect_atom(node: SNode, what: str) -> str:
    if not isinstance(node, SAtom):
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected {what}", *node.loc)
    return node.text


def _rational(node: SNode, what: str = "a rational") -> Fraction:
    text = _expect_atom(node, what)
    if not is_rational_literal(text):
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected {what}, got {text!r}", *node.loc)
    try:
        return parse_rational(text)
    except ValueError as e:
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, str(e), *node.loc) from None


def _truth_value(node: SNode) -> TruthValue:
    value = _rational(node, "a truth value")
    if value < 0 or value > 1:
        raise ParseError(DiagnosticCode.VALUE_OUT_OF_RANGE, f"value {format_rational(value)} is outside [0,1]", *node.loc)
    return TruthValue(value)


def _integer(node: SNode, what: str) -> int:
    text = _expect_atom(node, what)
    if not text.isdigit():
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected {what}, got {text!r}", *node.loc)
    return int(text)


def _name(node: SNode, what: str) -> str:
    text = _expect_atom(node, what)
    if not NAME_PATTERN.match(text) or text in RESERVED_WORDS:
        raise ParseError(DiagnosticCode.INVALID_NAME, f"invalid {what} {text!r}", *node.loc)
    return text


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

class FormulaReader:
    """Builds terms and formulas from s-expressions, checking symbols against a vocabulary."""

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.predicates = vocab.predicate_arities
        self.functions = vocab.function_arities

    def term(self, node: SNode) -> Term:
        if isinstance(node, SAtom):
            text = node.text
            if text.startswith("#"):
                if len(text) == 1:
                    raise ParseError(DiagnosticCode.SYNTAX_ERROR, "empty element literal", *node.loc)
                return Elem(text[1:])
            if self.vocab.has_constant(text):
                return Const(text)
            if text in self.predicates or text in self.functions:
                raise ParseError(DiagnosticCode.ARITY_MISMATCH, f"symbol {text} used without arguments", *node.loc)
            return Var(_name(node, "variable name"))

        if not node.children:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, "empty term", *node.loc)
        head = node.head
        if head is None:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected a function symbol", *node.loc)
        arity = self.functions.get(head)
        if arity is None:
            raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, f"unknown function {head!r}", *node.loc)
        args = node.children[1:]
        if len(args) != arity:
            raise ParseError(
                DiagnosticCode.ARITY_MISMATCH,
                f"function {head} has arity {arity}, applied to {len(args)} argument(s)",
                *node.loc,
            )
        return Apply(head, tuple(self.term(a) for a in args))

    def formula(self, node: SNode) -> Formula:
        if isinstance(node, SAtom):
            if is_rational_literal(node.text):
                return constant(_truth_value(node))
            if node.text in self.predicates:
                raise ParseError(
                    DiagnosticCode.ARITY_MISMATCH, f"predicate {node.text} used without arguments", *node.loc
                )
            raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, f"expected a formula, got {node.text!r}", *node.loc)

        if not node.children:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, "empty formula", *node.loc)
        head = node.head
        if head is None:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected a connective, quantifier or predicate", *node.loc)
        args = node.children[1:]

        if head in QUANTIFIER_KINDS:
            if len(args) != 2:
                raise ParseError(DiagnosticCode.ARITY_MISMATCH, f"{head} takes a variable and a body", *node.loc)
            var = _name(args[0], "variable name")
            if self.vocab.has_constant(var):
                raise ParseError(
                    DiagnosticCode.INVALID_NAME, f"{head} binds {var}, which is a constant symbol", *args[0].loc
                )
            return Quant(head, var, self.formula(args[1]))

        conn = BASIS.get(head)
        if conn is not None:
            if len(args) != conn.arity:
                raise ParseError(
                    DiagnosticCode.ARITY_MISMATCH,
                    f"connective {head} expects {conn.arity} argument(s), got {len(args)}",
                    *node.loc,
                )
            return Conn(conn, tuple(self.formula(a) for a in args))

        arity = self.predicates.get(head)
        if arity is None:
            raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, f"unknown predicate {head!r}", *node.loc)
        if len(args) != arity:
            raise ParseError(
                DiagnosticCode.ARITY_MISMATCH,
                f"predicate {head} has arity {arity}, applied to {len(args)} argument(s)",
                *node.loc,
            )
        return Atom(head, tuple(self.term(a) for a in args))


def parse_formula(text: str, vocab: Vocabulary) -> Formula:
    """
    Parse one formula.

    Args:
        text: The formula source, e.g. "(sup x (P x))"
        vocab: Vocabulary used for symbol and arity checks

    Returns:
        The formula

    Raises:
        ParseError: with a distinct diagnostic code per failure kind
    """
    return FormulaReader(vocab).formula(read_one(text, "formula"))


def parse_term(text: str, vocab: Vocabulary) -> Term:
    return FormulaReader(vocab).term(read_one(text, "term"))


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

def _vocabulary_from(node: SNode) -> Vocabulary:
    vocab_node = _expect_list(node, "vocabulary", "vocabulary")
    predicates, functions, constants = [], [], []
    for entry in vocab_node.children[1:]:
        entry = _expect_list(entry, "declaration")
        kind = entry.head
        if kind in ("predicate", "function"):
            if len(entry) != 3:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected ({kind} NAME ARITY)", *entry.loc)
            name = _name(entry[1], f"{kind} name")
            arity = _integer(entry[2], "an arity")
            if arity < 1:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"{kind} {name} needs arity >= 1", *entry[2].loc)
            (predicates if kind == "predicate" else functions).append((name, arity))
        elif kind == "constant":
            if len(entry) != 2:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected (constant NAME)", *entry.loc)
            name = _name(entry[1], "constant name")
            if BOUND_NAME_PATTERN.match(name):
                raise ParseError(
                    DiagnosticCode.INVALID_NAME, f"constant name {name!r} is reserved for bound variables", *entry[1].loc
                )
            constants.append(name)
        else:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"unknown declaration {kind!r}", *entry.loc)
    try:
        return Vocabulary(predicates=tuple(predicates), functions=tuple(functions), constants=tuple(constants))
    except StructuralError as e:
        raise ParseError(DiagnosticCode.DUPLICATE_ENTRY, e.message, *vocab_node.loc) from None


def parse_vocabulary(text: str) -> Vocabulary:
    return _vocabulary_from(read_one(text, "vocabulary"))


def _read_table(section: SList, name: str, arity: int, members: set, value_of) -> Dict[Tuple[str, ...], object]:
    table = {}
    for entry in section.children[2:]:
        entry = _expect_list(entry, "table entry")
        if len(entry) != arity + 1:
            raise ParseError(
                DiagnosticCode.ARITY_MISMATCH,
                f"entry of {name} needs {arity} element(s) and a value",
                *entry.loc,
            )
        args = []
        for arg in entry.children[:arity]:
            label = _expect_atom(arg, "an element")
            if label not in members:
                raise ParseError(DiagnosticCode.FOREIGN_ELEMENT, f"{label!r} is not in the universe", *arg.loc)
            args.append(label)
        key = tuple(args)
        if key in table:
            raise ParseError(DiagnosticCode.DUPLICATE_ENTRY, f"duplicate entry {name}{key}", *entry.loc)
        table[key] = value_of(entry.children[arity])
    if len(table) != len(members) ** arity:
        raise ParseError(DiagnosticCode.INCOMPLETE_TABLE, f"incomplete table {name}", *section.loc)
    return table


def parse_structure(text: str) -> GeneralStructure:
    """
    Parse a structure document.

    (structure (vocabulary ...) (universe a b) (predicate P (a 1/4) (b 3/4))
               (function F (a b) (b a)) (constant c a))
    """
    root = _expect_list(read_one(text, "structure"), "structure", "structure")
    sections = root.children[1:]
    if len(sections) < 2:
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, "structure needs a vocabulary and a universe", *root.loc)
    vocab = _vocabulary_from(sections[0])
    universe_node = _expect_list(sections[1], "universe", "universe")

    universe = []
    for item in universe_node.children[1:]:
        label = _expect_atom(item, "an element label")
        if label in universe:
            raise ParseError(DiagnosticCode.DUPLICATE_ENTRY, f"element {label!r} listed twice", *item.loc)
        universe.append(label)
    if not universe:
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, "the universe must be non-empty", *universe_node.loc)
    members = set(universe)

    predicate_tables: Dict[str, dict] = {}
    function_tables: Dict[str, dict] = {}
    constant_map: Dict[str, str] = {}

    def element_value(node: SNode) -> str:
        label = _expect_atom(node, "an element")
        if label not in members:
            raise ParseError(DiagnosticCode.FOREIGN_ELEMENT, f"{label!r} is not in the universe", *node.loc)
        return label

    for section in sections[2:]:
        section = _expect_list(section, "table")
        kind = section.head
        if kind not in ("predicate", "function", "constant") or len(section) < 2:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"unknown section {kind!r}", *section.loc)
        name = _expect_atom(section[1], "a symbol")
        if kind == "predicate":
            arity = vocab.predicate_arity(name)
            target, value_of = predicate_tables, _truth_value
        elif kind == "function":
            arity = vocab.function_arity(name)
            target, value_of = function_tables, element_value
        else:
            if not vocab.has_constant(name):
                raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, f"undeclared constant {name!r}", *section[1].loc)
            if name in constant_map:
                raise ParseError(DiagnosticCode.DUPLICATE_ENTRY, f"constant {name} bound twice", *section.loc)
            if len(section) != 3:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected (constant NAME ELEMENT)", *section.loc)
            constant_map[name] = element_value(section[2])
            continue
        if arity is None:
            raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, f"undeclared {kind} {name!r}", *section[1].loc)
        if name in target:
            raise ParseError(DiagnosticCode.DUPLICATE_ENTRY, f"second table for {name}", *section.loc)
        target[name] = _read_table(section, name, arity, members, value_of)

    for name, _ in vocab.predicates + vocab.functions:
        if name not in predicate_tables and name not in function_tables:
            raise ParseError(DiagnosticCode.INCOMPLETE_TABLE, f"incomplete table {name}", *root.loc)
    for name in vocab.constants:
        if name not in constant_map:
            raise ParseError(DiagnosticCode.INCOMPLETE_TABLE, f"constant {name} is not bound", *root.loc)

    try:
        return GeneralStructure(
            vocabulary=vocab,
            universe=tuple(universe),
            predicate_tables=predicate_tables,
            function_tables=function_tables,
            constant_map=constant_map,
        )
    except StructureError as e:
        raise ParseError(DiagnosticCode.INCOMPLETE_TABLE, e.message, *root.loc) from None


def parse_theory(text: str, vocab: Vocabulary) -> Theory:
    root = _expect_list(read_one(text, "theory"), "theory", "theory")
    reader = FormulaReader(vocab)
    sentences = []
    for node in root.children[1:]:
        f = reader.formula(node)
        if not f.is_sentence:
            raise ParseError(
                DiagnosticCode.NOT_A_SENTENCE,
                f"theory member has free variables {sorted(f.free_vars)}",
                *node.loc,
            )
        sentences.append(f)
    return Theory(tuple(sentences))


def parse_sequence(text: str, vocab: Vocabulary) -> FormulaSequence:
    """(sequence (frame x y) (schedule exponential) phi_0 phi_1 ...)"""
    root = _expect_list(read_one(text, "sequence"), "sequence", "sequence")
    frame = tuple(settings.SEQUENCE_FRAME)
    schedule_name = "exponential"
    reader = FormulaReader(vocab)
    entries = []
    for node in root.children[1:]:
        if isinstance(node, SList) and node.head == "frame":
            frame = tuple(_name(v, "variable name") for v in node.children[1:])
        elif isinstance(node, SList) and node.head == "schedule":
            if len(node) != 2:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected (schedule NAME)", *node.loc)
            schedule_name = _expect_atom(node[1], "a schedule name")
        else:
            f = reader.formula(node)
            extra = f.free_vars - set(frame)
            if extra:
                raise ParseError(
                    DiagnosticCode.SYNTAX_ERROR,
                    f"entry has variables {sorted(extra)} outside the frame {list(frame)}",
                    *node.loc,
                )
            entries.append(f)
    try:
        schedule = schedule_from_text(schedule_name)
    except StructuralError as e:
        raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, e.message, *root.loc) from None
    return FormulaSequence(tuple(entries), frame=frame, schedule=schedule)


def parse_interpretation(text: str, vocab: Vocabulary) -> Interpretation:
    """
    Parse an interpretation document over the classical vocabulary `vocab`.

    (interpretation (grid 4) (predicate P 1) (lower P 1/2 phi) (upper P 1/2 psi) ...)
    Formulas for a k-ary P use the free variables x1..xk.
    """
    root = _expect_list(read_one(text, "interpretation"), "interpretation", "interpretation")
    reader = FormulaReader(vocab)
    denominator: Optional[int] = None
    predicates: List[Tuple[str, int]] = []
    lower: Dict[Tuple[str, Fraction], PositiveFormula] = {}
    upper: Dict[Tuple[str, Fraction], PositiveFormula] = {}

    for node in root.children[1:]:
        node = _expect_list(node, "interpretation entry")
        kind = node.head
        if kind == "grid":
            if len(node) != 2:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected (grid DENOMINATOR)", *node.loc)
            denominator = _integer(node[1], "a grid denominator")
        elif kind == "predicate":
            if len(node) != 3:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, "expected (predicate NAME ARITY)", *node.loc)
            predicates.append((_name(node[1], "predicate name"), _integer(node[2], "an arity")))
        elif kind in ("lower", "upper"):
            if len(node) != 4:
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected ({kind} NAME R FORMULA)", *node.loc)
            name = _expect_atom(node[1], "a predicate name")
            arities = dict(predicates)
            if name not in arities:
                raise ParseError(DiagnosticCode.UNKNOWN_SYMBOL, f"undeclared interpreted predicate {name!r}", *node[1].loc)
            r = _truth_value(node[2])
            f = reader.formula(node[3])
            if not is_positive(f):
                raise ParseError(DiagnosticCode.SYNTAX_ERROR, "formula is not positive", *node[3].loc)
            extra = f.free_vars - set(frame_variables(arities[name]))
            if extra:
                raise ParseError(
                    DiagnosticCode.SYNTAX_ERROR,
                    f"variables {sorted(extra)} outside the frame x1..x{arities[name]}",
                    *node[3].loc,
                )
            table = lower if kind == "lower" else upper
            key = (name, Fraction(r))
            if key in table:
                raise ParseError(DiagnosticCode.DUPLICATE_ENTRY, f"second {kind} entry for {name} at {r}", *node.loc)
            table[key] = PositiveFormula(f)
        else:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"unknown entry {kind!r}", *node.loc)

    if denominator is None:
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, "missing (grid DENOMINATOR)", *root.loc)
    for name, _ in predicates:
        for j in range(denominator + 1):
            r = Fraction(j, denominator)
            if (r != 1 and (name, r) not in lower) or (r != 0 and (name, r) not in upper):
                raise ParseError(
                    DiagnosticCode.INCOMPLETE_TABLE,
                    f"incomplete table {name}: no entry at {format_rational(r)}",
                    *root.loc,
                )
    try:
        return Interpretation(denominator=denominator, predicates=tuple(predicates), lower=lower, upper=upper)
    except StructuralError as e:
        raise ParseError(DiagnosticCode.SYNTAX_ERROR, e.message, *root.loc) from None


def parse_assignment(pairs: Sequence[str]) -> Dict[str, str]:
    """Read "x=a" pairs into an assignment."""
    assignment = {}
    for pair in pairs:
        var, sep, element = pair.partition("=")
        if not sep or not var or not element:
            raise ParseError(DiagnosticCode.SYNTAX_ERROR, f"expected VAR=ELEMENT, got {pair!r}")
        assignment[var] = element
    return assignment


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Elem):
        return f"#{t.label}"
    return "({} {})".format(t.function, " ".join(_render_term(a) for a in t.args))


def render_formula(f: Formula) -> str:
    """Text of f exactly as built, bound variable names included."""
    if isinstance(f, Atom):
        return "({} {})".format(f.predicate, " ".join(_render_term(a) for a in f.args))
    if isinstance(f, Quant):
        return f"({f.kind} {f.var} {render_formula(f.body)})"
    if not f.args:
        return format_rational(f.connective.value)
    return "({} {})".format(f.connective.name, " ".join(render_formula(a) for a in f.args))


def serialize_formula(f: Formula) -> str:
    """Canonical text: bound variables alpha-normalized."""
    return render_formula(alpha_normalize(f))


def serialize_vocabulary(vocab: Vocabulary) -> str:
    parts = [f"(predicate {n} {k})" for n, k in vocab.predicates]
    parts += [f"(function {n} {k})" for n, k in vocab.functions]
    parts += [f"(constant {c})" for c in vocab.constants]
    return "(vocabulary{})".format("".join(" " + p for p in parts))


def serialize_structure(structure: GeneralStructure) -> str:
    vocab = structure.vocabulary
    lines = [
        "(structure",
        "  " + serialize_vocabulary(vocab),
        "  (universe {})".format(" ".join(structure.universe)),
    ]
    for name, arity in vocab.predicates:
        entries = " ".join(
            "({} {})".format(" ".join(args), format_rational(structure.predicate_value(name, args)))
            for args in structure.tuples(arity)
        )
        lines.append(f"  (predicate {name} {entries})")
    for name, arity in vocab.functions:
        entries = " ".join(
            "({} {})".format(" ".join(args), structure.function_value(name, args))
            for args in structure.tuples(arity)
        )
        lines.append(f"  (function {name} {entries})")
    for name in vocab.constants:
        lines.append(f"  (constant {name} {structure.constant_value(name)})")
    return "\n".join(lines) + ")"


def serialize_theory(theory: Theory) -> str:
    if not len(theory):
        return "(theory)"
    return "(theory\n{})".format("\n".join("  " + serialize_formula(s) for s in theory)) + ")"


def serialize_sequence(seq: FormulaSequence) -> str:
    head = "(sequence (frame {}) (schedule {})".format(" ".join(seq.frame), seq.schedule.name)
    body = "".join("\n  " + serialize_formula(f) for f in seq.entries)
    return head + body + ")"


def serialize_interpretation(interp: Interpretation) -> str:
    lines = [f"(interpretation (grid {interp.denominator})"]
    lines += [f"  (predicate {n} {k})" for n, k in interp.predicates]
    for name, _ in interp.predicates:
        for r in interp.grid():
            for kind, table in (("lower", interp.lower), ("upper", interp.upper)):
                entry = table.get((name, r))
                if entry is not None:
                    lines.append(f"  ({kind} {name} {format_rational(r)} {serialize_formula(entry.formula)})")
    return "\n".join(lines) + ")"


def serialize(x) -> str:
    """Canonical, byte-deterministic text for any document object."""
    if isinstance(x, Formula):
        return serialize_formula(x)
    if isinstance(x, PositiveFormula):
        return serialize_formula(x.formula)
    if isinstance(x, Vocabulary):
        return serialize_vocabulary(x)
    if isinstance(x, GeneralStructure):
        return serialize_structure(x)
    if isinstance(x, Theory):
        return serialize_theory(x)
    if isinstance(x, FormulaSequence):
        return serialize_sequence(x)
    if isinstance(x, Interpretation):
        return serialize_interpretation(x)
    if isinstance(x, Fraction):
        return format_rational(x)
    raise AppError(f"cannot serialize {type(x).__name__}")
