"""Check results, seeded rational sampling and report serialization."""

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__

TOOL = "qtwist"
MAX_RETRIES = 100


@dataclass
class Check:
    id: str
    status: str  # pass | fail | skip
    detail: str = ""
    elapsed_ms: float = 0.0
    data: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self):
        return self.status == "pass"

    def as_dict(self):
        return {"id": self.id, "status": self.status, "detail": self.detail,
                "elapsed_ms": round(self.elapsed_ms, 3)}


def make_check(check_id, ok, detail="", **data):
    return Check(check_id, "pass" if ok else "fail", detail, data=data)


def timed(fn, *args, **kwargs):
    """Run a function returning a :class:`Check` and fill in its ``elapsed_ms``."""
    t0 = time.perf_counter()
    check = fn(*args, **kwargs)
    check.elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return check


def fmt_rational(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def parse_rational(text):
    """Parse ``"p/q"`` or an integer; anything float-like is rejected."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if any(c in s for c in ".eE") or not s:
        raise ValueError(f"expected an exact rational like 3 or -7/2, got {text!r}")
    return Fraction(s)


class RationalSampler:
    """Seeded rationals ``n/d`` with ``n`` in [-9, 9] and ``d`` in [1, 9] from ``random.Random``."""

    def __init__(self, seed):
        self.rng = random.Random(seed)

    def rational(self, nonzero=True):
        while True:
            n = self.rng.randint(-9, 9)
            if n or not nonzero:
                return Fraction(n, self.rng.randint(1, 9))

    def draw(self, names, avoid=()):
        """Draw a binding for ``names``; ``avoid`` maps names to forbidden values."""
        avoid = dict(avoid)
        out = {}
        for name in names:
            while True:
                v = self.rational()
                if v not in avoid.get(name, ()):
                    break
            out[name] = v
        return out


def sample_until(sampler, names, attempt, avoid=()):
    """Call ``attempt(binding)`` on fresh draws until it does not raise ZeroDivisionError."""
    last = None
    for _ in range(MAX_RETRIES):
        binding = sampler.draw(names, avoid)
        try:
            return binding, attempt(binding)
        except ZeroDivisionError as exc:
            last = exc
    raise RuntimeError(f"no nonsingular sample in {MAX_RETRIES} draws: {last}")


@dataclass
class CheckReport:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: object = None
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, check):
        self.checks.append(check)
        return check

    @property
    def ok(self):
        return all(c.status != "fail" for c in self.checks)

    def exit_code(self):
        return 0 if self.ok else 1

    def as_dict(self):
        out = {
            "tool": TOOL,
            "version": __version__,
            "command": self.command,
            "parameters": {k: fmt_rational(v) for k, v in self.parameters.items()},
            "seed": self.seed,
            "checks": [c.as_dict() for c in self.checks],
        }
        out.update(self.extra)
        return out

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=False)

    def to_text(self):
        lines = [f"{TOOL} {__version__}  {self.command}"]
        if self.parameters:
            lines.append("parameters: " + ", ".join(
                f"{k}={fmt_rational(v)}" for k, v in self.parameters.items()))
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        width = max((len(c.id) for c in self.checks), default=2)
        for c in self.checks:
            lines.append(f"{c.id:<{width}}  {c.status.upper():<4}  {c.elapsed_ms:9.1f} ms  {c.detail}")
        for k, v in self.extra.items():
            lines.append(f"{k}: {json.dumps(v)}")
        lines.append("overall: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)
