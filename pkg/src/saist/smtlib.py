"""SMT-LIB2 emission and a subprocess client for an external QF_NRA solver."""

import subprocess

import numpy as np

from .errors import ConfigError, SolverError
from .cones import ConeSystem, Sense


def _decimal(value, digits):
    """Positional decimal with `digits` significant figures (SMT-LIB has no exponents)."""
    s = np.format_float_positional(
        value, precision=digits, unique=False, fractional=False, trim="0"
    )
    if s.startswith("-"):
        return f"(- {s[1:]})"
    return s


def _form_term(P, digits):
    n = P.shape[0]
    parts = []
    for i in range(n):
        for j in range(i, n):
            coeff = P[i, i] if i == j else 2.0 * P[i, j]
            if coeff == 0.0:
                continue
            parts.append(f"(* {_decimal(coeff, digits)} x{i} x{j})")
    if not parts:
        return "0.0"
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def emit_smtlib(cone: ConeSystem, digits: int = 15) -> str:
    """Deterministic SMT-LIB2 text asking for a unit-norm point of the cone."""
    if digits < 6:
        raise ConfigError("digits must be >= 6")
    n = cone.n
    lines = ["(set-logic QF_NRA)"]
    for i in range(n):
        lines.append(f"(declare-const x{i} Real)")
    for c in cone.constraints:
        term = _form_term(c.P, digits)
        op = ">" if c.sense is Sense.STRICT_POSITIVE else "<="
        lines.append(f"(assert ({op} {term} 0))")
    norm = " ".join(f"(* x{i} x{i})" for i in range(n))
    norm = f"(+ {norm})" if n > 1 else norm
    lines.append(f"(assert (= {norm} 1))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def _tokenize(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read_sexpr(tokens, pos):
    if tokens[pos] != "(":
        return tokens[pos], pos + 1
    out = []
    pos += 1
    while pos < len(tokens) and tokens[pos] != ")":
        node, pos = _read_sexpr(tokens, pos)
        out.append(node)
    if pos >= len(tokens):
        raise SolverError("unbalanced parentheses in solver reply")
    return out, pos + 1


def _eval_real(node):
    if isinstance(node, str):
        try:
            return float(node)
        except ValueError as e:
            raise SolverError(f"cannot parse real literal {node!r}") from e
    if not node:
        raise SolverError("empty numeric expression")
    op = node[0]
    args = [_eval_real(a) for a in node[1:]]
    if op == "-":
        return -args[0] if len(args) == 1 else args[0] - args[1]
    if op == "/":
        return args[0] / args[1]
    if op == "+":
        return sum(args)
    if op == "*":
        out = 1.0
        for a in args:
            out *= a
        return out
    raise SolverError(f"unsupported operator {op!r} in model value")


def parse_model(text, n):
    """Extract the x0..x{n-1} assignment from a (get-model) reply."""
    tokens = _tokenize(text)
    values = {}
    pos = 0
    while pos < len(tokens):
        if tokens[pos] != "(":
            pos += 1
            continue
        node, pos = _read_sexpr(tokens, pos)
        stack = [node]
        while stack:
            cur = stack.pop()
            if not isinstance(cur, list):
                continue
            if len(cur) >= 5 and cur[0] == "define-fun" and isinstance(cur[1], str):
                name = cur[1]
                if name.startswith("x") and name[1:].isdigit():
                    values[int(name[1:])] = _eval_real(cur[4])
            else:
                stack.extend(cur)
    if set(values) != set(range(n)):
        raise SolverError(f"model is missing coordinates: got {sorted(values)}")
    return np.array([values[i] for i in range(n)])


class SolverClient:
    """Talks SMT-LIB2 v2.6 to a solver executable over a pipe.

    The solver must read a full script on stdin and reply with sat/unsat/
    unknown, followed by a model for sat.
    """

    def __init__(self, path, args=None, timeout=60.0, digits=15):
        self.path = path
        self.args = list(args) if args is not None else []
        self.timeout = timeout
        self.digits = digits

    def check(self, cone: ConeSystem):
        """Returns ('sat', witness) | ('unsat', None) | ('unknown', None)."""
        script = emit_smtlib(cone, self.digits)
        try:
            proc = subprocess.run(
                [self.path] + self.args,
                input=script,
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired:
            return "unknown", None
        except OSError as e:
            raise SolverError(f"failed to launch solver {self.path!r}: {e}") from e
        out = proc.stdout.strip()
        if not out:
            raise SolverError(f"solver produced no output (stderr: {proc.stderr[:200]!r})")
        head, _, rest = out.partition("\n")
        head = head.strip()
        if head == "unsat":
            return "unsat", None
        if head == "unknown":
            return "unknown", None
        if head == "sat":
            witness = parse_model(rest, cone.n)
            return "sat", witness
        raise SolverError(f"unrecognized solver verdict {head!r}")
