"""Parameter sweeps, growth-exponent fits and bound-verification reports."""

from __future__ import annotations

import csv
import io
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

import numpy as np

from .characters import (
    character,
    factorize,
    hyperbola_sum,
    hyperbola_sum_matrix,
    parse_label,
    primitive_characters,
)
from .dirichlet_l import product_bound, truncated_product
from .double_l import (
    REFERENCE_PRIORITY,
    EvalRequest,
    evaluate,
    theorem2_main_term,
)
from .errors import DomainError
from .special_fn import hl_estimates, oscillatory_integral

COLUMNS = (
    "q",
    "chi1_label",
    "chi2_label",
    "sigma1",
    "t1",
    "sigma2",
    "t2",
    "z_re",
    "z_im",
    "method",
    "value_re",
    "value_im",
    "err_est",
    "quantity",
    "elapsed_ms",
)
QUANTITIES = (
    "value",
    "mainterm-residual",
    "product-approx-residual",
    "hyperbola-sum",
    "oscillatory-regimes",
)
_QUANTITY_ALIASES = {
    "residual": "mainterm-residual",
    "product-approx": "product-approx-residual",
    "hyperbola": "hyperbola-sum",
    "oscillatory": "oscillatory-regimes",
}
FILTERS = ("all-primitive-pairs", "fixed-pair")
SUITES = ("theorem1", "theorem2", "lemma21", "lemma22", "hl")
WORKERS_ENV = "DOUBLE_ELL_WORKERS"


class ConfigError(ValueError):
    """Malformed sweep or verification configuration."""


class SweepFailed(RuntimeError):
    """Every grid point of a sweep raised."""


# ---------------------------------------------------------------- records


@dataclass
class Record:
    q: int
    chi1_label: str
    chi2_label: str
    sigma1: float
    t1: float
    sigma2: float
    t2: float
    z_re: float
    z_im: float
    method: str
    value_re: float
    value_im: float
    err_est: float
    quantity: str
    elapsed_ms: float | None = None

    @property
    def value(self):
        return complex(self.value_re, self.value_im)

    @property
    def s1(self):
        return complex(self.sigma1, self.t1)

    @property
    def s2(self):
        return complex(self.sigma2, self.t2)

    @property
    def z(self):
        return complex(self.z_re, self.z_im)

    @property
    def failed(self):
        return self.method.startswith("error:")

    def as_dict(self):
        return asdict(self)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _parse_float(text):
    return float(text) if text != "" else None


_PARSERS = {
    "q": int,
    "chi1_label": str,
    "chi2_label": str,
    "method": str,
    "quantity": str,
    "elapsed_ms": _parse_float,
}


def write_table(records, path=None):
    """Write records as CSV (to ``path``, or return the text when None)."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def read_table(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ConfigError(f"{path}: columns {reader.fieldnames} differ from {list(COLUMNS)}")
        return [
            Record(**{c: _PARSERS.get(c, float)(row[c]) for c in COLUMNS}) for row in reader
        ]


# ---------------------------------------------------------------- sweep specification


def parse_complex(value):
    """Accept 2, "RE,IM", [re, im] or a complex."""
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, str):
        parts = value.split(",")
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot read a complex number from {value!r}")


@dataclass(frozen=True)
class Ladder:
    """Points sigma + i t with t = start * ratio^k, k < count."""

    sigma: float
    start: float
    ratio: float = 2.0
    count: int = 6

    def __post_init__(self):
        if self.count < 1 or self.start <= 0 or self.ratio <= 1:
            raise ConfigError(f"ladder must be nonempty and strictly increasing: {self}")

    def points(self):
        return [complex(self.sigma, self.start * self.ratio**k) for k in range(self.count)]


def _expand_grid(name, entries):
    if entries is None:
        return []
    if isinstance(entries, dict) or not isinstance(entries, (list, tuple)):
        entries = [entries]
    out = []
    for e in entries:
        if isinstance(e, Ladder):
            out.extend(e.points())
        elif isinstance(e, dict):
            try:
                out.extend(Ladder(**e).points())
            except TypeError as exc:
                raise ConfigError(f"{name}: bad ladder {e}") from exc
        else:
            out.append(parse_complex(e))
    return out


_XI_FORMS = (
    (re.compile(r"^tau$"), lambda tau, _: tau),
    (re.compile(r"^sqrt\(tau\)$"), lambda tau, _: math.sqrt(tau)),
    (re.compile(r"^tau/([0-9.eE+-]+)$"), lambda tau, k: tau / float(k)),
    (re.compile(r"^tau\^([0-9.eE+-]+)$"), lambda tau, k: tau ** float(k)),
)


def resolve_xi(entry, tau):
    """xi as a number, or relative to tau: "tau", "sqrt(tau)", "tau/K", "tau^p"."""
    if not isinstance(entry, str):
        return float(entry)
    text = entry.replace(" ", "")
    for pattern, fn in _XI_FORMS:
        m = pattern.match(text)
        if m:
            return fn(tau, m.group(1) if m.groups() else None)
    return float(text)


@dataclass
class SweepSpec:
    """A grid of evaluation points and the quantity recorded at each.

    Column use per quantity: ``value`` and ``mainterm-residual`` echo s1, s2
    and z; ``product-approx-residual`` stores z1, z2 in the s columns and tau
    in z_re; ``hyperbola-sum`` stores tau in sigma1 and xi in sigma2;
    ``oscillatory-regimes`` stores xi in sigma1, s in the s2 columns, and
    writes a cosine and a sine row per point.
    """

    moduli: list
    character_filter: str = "all-primitive-pairs"
    s1_grid: list = field(default_factory=list)
    s2_grid: list = field(default_factory=list)
    method: str = "psi-series"
    quantity: str = "value"
    output_path: str | None = None
    z_grid: list = field(default_factory=lambda: [0j])
    tau_grid: list = field(default_factory=list)
    xi_grid: list = field(default_factory=list)
    chi1_label: str | None = None
    chi2_label: str | None = None
    pair_reduction: str = "none"
    tolerance: float = 1e-12
    timing: bool = False
    workers: int | None = None

    def __post_init__(self):
        self.quantity = _QUANTITY_ALIASES.get(self.quantity, self.quantity)
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {self.quantity!r}; expected one of {QUANTITIES}")
        if self.character_filter not in FILTERS:
            raise ConfigError(f"unknown character_filter {self.character_filter!r}")
        if self.pair_reduction not in ("none", "max-abs"):
            raise ConfigError(f"unknown pair_reduction {self.pair_reduction!r}")
        if not self.moduli:
            raise ConfigError("moduli must be nonempty")
        self.moduli = [int(q) for q in self.moduli]
        if self.character_filter == "fixed-pair" and (
            self.chi1_label is None or self.chi2_label is None
        ):
            raise ConfigError("fixed-pair needs chi1_label and chi2_label")
        self.s1_grid = _expand_grid("s1_grid", self.s1_grid)
        self.s2_grid = _expand_grid("s2_grid", self.s2_grid)
        self.z_grid = _expand_grid("z_grid", self.z_grid) or [0j]
        self.tau_grid = [float(t) for t in self.tau_grid]
        needs = {
            "value": ("s1_grid", "s2_grid"),
            "mainterm-residual": ("s1_grid", "s2_grid"),
            "product-approx-residual": ("s1_grid", "s2_grid", "tau_grid"),
            "hyperbola-sum": ("tau_grid", "xi_grid"),
            "oscillatory-regimes": ("xi_grid", "s2_grid"),
        }[self.quantity]
        for name in needs:
            if not getattr(self, name):
                raise ConfigError(f"{name} must be nonempty for quantity {self.quantity}")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown sweep fields: {sorted(extra)}")
        data = dict(data)
        for key in ("chi1_label", "chi2_label"):
            if isinstance(data.get(key), (list, tuple)):
                data[key] = ",".join(str(v) for v in data[key])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _pairs(spec, q):
    if spec.character_filter == "fixed-pair":
        return [(character(q, parse_label(spec.chi1_label)), character(q, parse_label(spec.chi2_label)))]
    prim = primitive_characters(q)
    return [(a, b) for a in prim for b in prim]


def _tasks(spec):
    """Work units in lexicographic grid order."""
    tasks = []
    for q in spec.moduli:
        if spec.quantity == "hyperbola-sum" and spec.pair_reduction == "max-abs":
            for tau in spec.tau_grid:
                for xi in spec.xi_grid:
                    tasks.append(("hyperbola-max", q, spec.character_filter, spec.chi1_label, spec.chi2_label, tau, resolve_xi(xi, tau)))
            continue
        for chi1, chi2 in _pairs(spec, q):
            labels = (q, chi1.label, chi2.label)
            if spec.quantity == "value":
                for s1 in spec.s1_grid:
                    for s2 in spec.s2_grid:
                        for z in spec.z_grid:
                            tasks.append(("value", *labels, s1, s2, z, spec.method, spec.tolerance))
            elif spec.quantity == "mainterm-residual":
                for s1 in spec.s1_grid:
                    for s2 in spec.s2_grid:
                        tasks.append(("mainterm", *labels, s1, s2))
            elif spec.quantity == "product-approx-residual":
                for z1 in spec.s1_grid:
                    for z2 in spec.s2_grid:
                        for tau in spec.tau_grid:
                            tasks.append(("product", *labels, z1, z2, tau))
            elif spec.quantity == "hyperbola-sum":
                for tau in spec.tau_grid:
                    for xi in spec.xi_grid:
                        tasks.append(("hyperbola", *labels, tau, resolve_xi(xi, tau)))
            else:
                for xi in spec.xi_grid:
                    for s in spec.s2_grid:
                        tasks.append(("oscillatory", *labels, resolve_xi(xi, 0.0), s))
    return tasks


# ---------------------------------------------------------------- work units


@lru_cache(maxsize=1024)
def _cached_eval(q, l1, l2, s1, s2, z, method, tol):
    return evaluate(EvalRequest(s1, s2, q, l1, l2, z=z, method=method, tolerance=tol))


def _reference(q, l1, l2, s1, s2):
    """Highest-priority evaluator that accepts (s1, s2)."""
    for method in REFERENCE_PRIORITY:
        try:
            return _cached_eval(q, l1, l2, s1, s2, 0j, method, 1e-12)
        except DomainError:
            continue
    raise DomainError(f"no evaluator accepts s1={s1}, s2={s2}")


def _record(q, l1, l2, s1, s2, z, method, value, err, quantity):
    lab = lambda v: ",".join(str(x) for x in v) if isinstance(v, tuple) else str(v)  # noqa: E731
    return Record(
        q, lab(l1), lab(l2), s1.real, s1.imag, s2.real, s2.imag, z.real, z.imag,
        method, value.real, value.imag, float(err), quantity,
    )


def _run_task(task):
    kind, q = task[0], task[1]
    if kind == "value":
        _, q, l1, l2, s1, s2, z, method, tol = task
        res = _cached_eval(q, l1, l2, s1, s2, z, EvalRequest(s1, s2, q, l1, l2, method=method).method, tol)
        return [_record(q, l1, l2, s1, s2, z, res.method, res.value, res.error_estimate, "value")]
    if kind == "mainterm":
        _, q, l1, l2, s1, s2 = task
        chi1, chi2 = character(q, l1), character(q, l2)
        main = theorem2_main_term(s1, s2, chi1, chi2, with_reference=False)
        ref = _reference(q, l1, l2, s1, s2)
        return [_record(q, l1, l2, s1, s2, 0j, ref.method, ref.value - main.main_term, ref.error_estimate, "mainterm-residual")]
    if kind == "product":
        _, q, l1, l2, z1, z2, tau = task
        res = truncated_product(z1, z2, character(q, l1), character(q, l2), tau)
        diff = res.truncated_sum - res.true_product
        return [_record(q, l1, l2, z1, z2, complex(tau), res.case, diff, res.bound_prediction, "product-approx-residual")]
    if kind == "hyperbola":
        _, q, l1, l2, tau, xi = task
        val = hyperbola_sum(character(q, l1), character(q, l2), tau, xi)
        return [_record(q, l1, l2, complex(tau), complex(xi), 0j, "enumeration", val, 0.0, "hyperbola-sum")]
    if kind == "hyperbola-max":
        _, q, filt, c1, c2, tau, xi = task
        if filt == "fixed-pair":
            chars1, chars2 = [character(q, parse_label(c1))], [character(q, parse_label(c2))]
        else:
            chars1 = chars2 = primitive_characters(q)
        if not chars1:
            return []
        mat = hyperbola_sum_matrix(chars1, chars2, tau, xi)
        i, j = np.unravel_index(int(np.argmax(np.abs(mat))), mat.shape)
        return [_record(q, chars1[i].label, chars2[j].label, complex(tau), complex(xi), 0j, "enumeration-max", complex(mat[i, j]), 0.0, "hyperbola-sum")]
    _, q, l1, l2, xi, s = task
    res = oscillatory_integral(xi, s)
    xi_c = complex(xi)
    return [
        _record(q, l1, l2, xi_c, s, 0j, f"cosine:{res.regime}", res.cosine_part, 0.0, "oscillatory-regimes"),
        _record(q, l1, l2, xi_c, s, 0j, f"sine:{res.regime}", res.sine_part, 0.0, "oscillatory-regimes"),
    ]


def _error_record(task, exc):
    kind, q = task[0], task[1]
    nan = float("nan")
    name = f"error:{type(exc).__name__}"
    if kind == "hyperbola-max":
        _, q, _, c1, c2, tau, xi = task
        return [Record(q, c1 or "", c2 or "", tau, 0.0, xi, 0.0, 0.0, 0.0, name, nan, nan, nan, "hyperbola-sum")]
    l1, l2 = task[2], task[3]
    if kind in ("value", "mainterm"):
        s1, s2 = task[4], task[5]
        z = task[6] if kind == "value" else 0j
        quantity = "value" if kind == "value" else "mainterm-residual"
    elif kind == "product":
        s1, s2, z, quantity = task[4], task[5], complex(task[6]), "product-approx-residual"
    elif kind == "hyperbola":
        s1, s2, z, quantity = complex(task[4]), complex(task[5]), 0j, "hyperbola-sum"
    else:
        s1, s2, z, quantity = complex(task[4]), task[5], 0j, "oscillatory-regimes"
    return [_record(q, l1, l2, s1, s2, z, name, complex(nan, nan), nan, quantity)]


def _guarded(args):
    task, timing = args
    start = time.perf_counter()
    try:
        rows = _run_task(task)
    except (ArithmeticError, ValueError) as exc:
        return _error_record(task, exc), True
    if timing:
        ms = (time.perf_counter() - start) * 1e3
        for r in rows:
            r.elapsed_ms = ms
    return rows, False


def worker_count(spec_workers=None):
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
    else:
        n = spec_workers or 1
    if n < 1:
        raise ConfigError(f"worker count must be >= 1, got {n}")
    return n


def run_sweep(spec):
    """Evaluate every grid point; rows come back in grid order."""
    if isinstance(spec, dict):
        spec = SweepSpec.from_dict(spec)
    tasks = _tasks(spec)
    jobs = [(t, spec.timing) for t in tasks]
    n = worker_count(spec.workers)
    if n == 1 or len(jobs) < 2:
        results = [_guarded(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_guarded, jobs))
    if results and all(failed for _, failed in results):
        raise SweepFailed(f"all {len(results)} grid points failed")
    records = [r for rows, _ in results for r in rows]
    if spec.output_path:
        write_table(records, spec.output_path)
    return records


# ---------------------------------------------------------------- exponent fits


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def as_dict(self):
        return asdict(self)


def column(row, name):
    """A CSV column or a derived one: qt2, abs_value, abs_residual, abs_t2."""
    if isinstance(row, dict):
        row = Record(**{c: row[c] for c in COLUMNS})
    if name == "qt2":
        return row.q * abs(row.t2)
    if name in ("abs_value", "abs_residual"):
        return abs(row.value)
    if name == "abs_t2":
        return abs(row.t2)
    return getattr(row, name)


def fit_exponent(rows, x_column, y_column):
    """Least-squares slope of log y against log x."""
    xs = [column(r, x_column) for r in rows]
    ys = [column(r, y_column) for r in rows]
    bad = [i for i, (x, y) in enumerate(zip(xs, ys)) if not (x > 0 and y > 0)]
    if bad:
        raise DomainError(f"nonpositive or missing values in rows {bad} for ({x_column}, {y_column})")
    if len(xs) < 3:
        raise DomainError(f"need at least 3 rows, got {len(xs)}")
    lx, ly = np.log(np.array(xs, float)), np.log(np.array(ys, float))
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ np.array([slope, intercept])
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(slope), float(intercept), r2, len(xs))


# ---------------------------------------------------------------- bound models and reports


@dataclass(frozen=True)
class BoundModel:
    """predicted = q^a (q|t2|)^(b + eps), plus the odd-parity term when flagged.

    The odd term is (1 + |t1 + t2|) q^(3/2+eps) (q|t2|)^(-min(1, sigma_sum/2) + eps).
    """

    exponent_q: float
    exponent_t: float
    epsilon: float = 0.1
    extra_odd_term: bool = False
    delta: float = 0.0
    sigma_sum: float = 1.0

    def main(self, q, t2):
        return q**self.exponent_q * (q * abs(t2)) ** (self.exponent_t + self.epsilon)

    def odd_term(self, q, t2, t1=0.0):
        return (1 + abs(t1 + t2)) * q ** (1.5 + self.epsilon) * (q * abs(t2)) ** (
            -min(1.0, self.sigma_sum / 2) + self.epsilon
        )

    def predicted(self, q, t2, t1=0.0):
        pred = self.main(q, t2)
        if self.extra_odd_term:
            pred += self.odd_term(q, t2, t1)
        return pred


def theorem1_model(sigma1, sigma2, kappa, epsilon=0.1):
    delta = max(0.0, 1 - sigma1 - sigma2)
    return BoundModel(0.0, 0.5 + delta, epsilon, bool(kappa), delta, sigma1 + sigma2)


def theorem2_model(sigma1, sigma2, kappa, epsilon=0.1):
    delta = max(0.0, 1 - sigma1 - sigma2)
    return BoundModel(0.5, delta, epsilon, bool(kappa), delta, sigma1 + sigma2)


@dataclass
class Report:
    suite: str
    points: list
    summary: dict
    passed: bool
    hard_failure: bool = False

    def as_dict(self):
        return asdict(self)


def _primes_upto(n):
    return [p for p in range(2, n + 1) if factorize(p) == [(p, 1)]]


def _default_ladder_sweep(quantity):
    # q = 3: its one (odd) primitive character twice; q = 5: every primitive
    # chi1 against the even primitive chi2
    ladder = [{"sigma": 0.5, "start": 10, "ratio": 2, "count": 6}]
    pairs = [(3, "1", "1")] + [(5, l1, "2") for l1 in ("1", "2", "3")]
    return [
        dict(moduli=[q], character_filter="fixed-pair", chi1_label=l1, chi2_label=l2,
             s1_grid=[1.0], s2_grid=ladder, quantity=quantity)
        for q, l1, l2 in pairs
    ]


def _default_lemma22():
    # Re(z1 - z2) > 1, = 1 and < 1; the last two are z1 = 1, z2 = s1 + s2
    points = [
        ("2.5,3", "0.6,-2"),
        ("1.5,2", "0.5,-3"),
        ("2,1", "1,5"),
        ("1,0", "1.5,10"),
        ("1,0", "0.75,20"),
    ]
    return [
        dict(moduli=[q], character_filter="fixed-pair", chi1_label="1", chi2_label=l2,
             s1_grid=[z1], s2_grid=[z2], tau_grid=[100, 1000, 10000],
             quantity="product-approx-residual")
        for q, l2 in ((5, "2"), (7, "3"))
        for z1, z2 in points
    ]


DEFAULT_CONFIGS = {
    "theorem1": {"epsilon": 0.1, "slack": 0.15, "sweeps": _default_ladder_sweep("value")},
    "theorem2": {"epsilon": 0.1, "slack": 0.25, "sweeps": _default_ladder_sweep("mainterm-residual")},
    "lemma21": {
        "sweeps": [
            dict(moduli=[p for p in _primes_upto(101) if p > 2], quantity="hyperbola-sum",
                 tau_grid=[100, 1000, 10000], xi_grid=["sqrt(tau)", "tau/10", "tau"],
                 pair_reduction="max-abs")
        ]
    },
    "lemma22": {"limit": 5.0, "sweeps": _default_lemma22()},
    "hl": {
        "limit": 10.0,
        "spot_checks": 6,
        "sweeps": [
            dict(moduli=[3], character_filter="fixed-pair", chi1_label="1", chi2_label="1",
                 quantity="oscillatory-regimes",
                 xi_grid=[0.1, 0.5, 1, 2, 3.5, 5, 7, 9, 12, 14, 17, 20, 25, 28, 33, 40, 50, 60, 80, 100, 140, 200],
                 s2_grid=[f"{sig},{t}" for sig in (0.25, 0.5, 0.75) for t in (5, 12, 20, 30, -7)])
        ],
    },
}


def _config(config):
    if isinstance(config, str):
        config = {"suite": config}
    config = dict(config)
    suite = config.get("suite")
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {SUITES}")
    merged = dict(DEFAULT_CONFIGS[suite])
    merged.update(config)
    return merged


def build_table(config):
    """Run the sweeps of a verification config and concatenate their rows."""
    config = _config(config)
    rows = []
    for sweep in config["sweeps"]:
        sweep = dict(sweep)
        if "workers" in config and "workers" not in sweep:
            sweep["workers"] = config["workers"]
        rows.extend(run_sweep(SweepSpec.from_dict(sweep)))
    return rows


def verify_bounds(config, rows=None):
    """Measure a bound suite; ``rows`` (e.g. read from CSV) skips the sweeps."""
    config = _config(config)
    if rows is None:
        if config.get("input"):
            rows = read_table(config["input"])
        else:
            rows = build_table(config)
            if config.get("output_path"):
                write_table(rows, config["output_path"])
    return _REPORTERS[config["suite"]](rows, config)


def _groups(rows, key):
    out = {}
    for r in rows:
        out.setdefault(key(r), []).append(r)
    return out


def _failed_summary(rows):
    return [asdict(r) for r in rows if r.failed]


def _theorem_report(rows, config, suite):
    eps, slack = config["epsilon"], config["slack"]
    points, fits, ok = [], [], True
    failed = _failed_summary(rows)
    good = [r for r in rows if not r.failed]
    for key, grp in _groups(good, lambda r: (r.q, r.chi1_label, r.chi2_label, r.sigma1, r.t1, r.sigma2)).items():
        q, l1, l2, sigma1, t1, sigma2 = key
        kappa = character(q, parse_label(l2)).parity
        make = theorem1_model if suite == "theorem1" else theorem2_model
        model = make(sigma1, sigma2, kappa, eps)
        delta = model.delta
        limit = (0.5 + delta if suite == "theorem1" else delta) + slack
        ratios = []
        for r in grp:
            main = model.main(q, r.t2)
            extra = model.odd_term(q, r.t2, r.t1)
            pred = model.predicted(q, r.t2, r.t1)
            ratio = abs(r.value) / pred
            ratios.append(ratio)
            points.append({
                "q": q, "chi1": l1, "chi2": l2, "s1": [r.sigma1, r.t1], "s2": [r.sigma2, r.t2],
                "measured": abs(r.value), "err_est": r.err_est, "reference": r.method,
                "predicted_even": main, "predicted_odd_extra": extra, "predicted": pred, "ratio": ratio,
            })
        fit = fit_exponent(grp, "qt2", "abs_value") if len(grp) >= 3 else None
        passed = fit is not None and fit.slope <= limit
        ok &= passed
        fits.append({
            "q": q, "chi1": l1, "chi2": l2, "sigma1": sigma1, "sigma2": sigma2, "kappa2": kappa,
            "delta": delta, "slope": fit.slope if fit else None,
            "r_squared": fit.r_squared if fit else None, "slope_limit": limit,
            "measured_constant": max(ratios), "passed": passed,
        })
    summary = {
        "fits": fits,
        "max_ratio": max((p["ratio"] for p in points), default=None),
        "failed_points": failed,
    }
    return Report(suite, points, summary, ok and not failed and bool(fits))


def _lemma21_report(rows, config):
    points, worst = [], 0.0
    failed = _failed_summary(rows)
    for r in rows:
        if r.failed:
            continue
        tau, xi = r.sigma1, r.sigma2
        bound = xi * math.sqrt(r.q) * math.log(r.q)
        ratio = abs(r.value) / bound
        worst = max(worst, ratio)
        points.append({"q": r.q, "tau": tau, "xi": xi, "chi1": r.chi1_label, "chi2": r.chi2_label,
                       "measured": abs(r.value), "predicted": bound, "ratio": ratio})
    violations = [p for p in points if p["ratio"] > 1]
    summary = {"max_ratio": worst, "violations": len(violations), "failed_points": failed}
    passed = not violations and not failed and bool(points)
    return Report("lemma21", points, summary, passed, hard_failure=bool(violations))


def _lemma22_report(rows, config):
    limit = config.get("limit", 5.0)
    points = []
    failed = _failed_summary(rows)
    for r in rows:
        if r.failed:
            continue
        z1, z2, tau = r.s1, r.s2, r.z_re
        bound, case = product_bound(z1, z2, r.q, tau)
        ratio = abs(r.value) / bound
        points.append({"q": r.q, "chi1": r.chi1_label, "chi2": r.chi2_label, "z1": [z1.real, z1.imag],
                       "z2": [z2.real, z2.imag], "tau": tau, "case": case,
                       "measured": abs(r.value), "predicted": bound, "ratio": ratio})
    cases = sorted({p["case"] for p in points})
    worst = max((p["ratio"] for p in points), default=None)
    summary = {
        "max_ratio": worst,
        "measured_constant": worst,
        "limit": limit,
        "within_bound": sum(p["ratio"] <= 1 for p in points),
        "cases": cases,
        "failed_points": failed,
    }
    passed = bool(points) and worst <= limit and not failed
    return Report("lemma22", points, summary, passed)


def quadrature_oscillatory(xi, s):
    """C and S by scipy's Fourier-weight quadrature (independent check)."""
    from scipy import integrate

    s = complex(s)

    def parts(weight):
        re = integrate.quad(lambda u: u ** -s.real * math.cos(s.imag * math.log(u)), xi, np.inf,
                            weight=weight, wvar=1.0, limlst=200)[0]
        im = integrate.quad(lambda u: -(u ** -s.real) * math.sin(s.imag * math.log(u)), xi, np.inf,
                            weight=weight, wvar=1.0, limlst=200)[0]
        return complex(re, im)

    return parts("cos"), parts("sin")


def _hl_report(rows, config):
    limit = config.get("limit", 10.0)
    points = []
    failed = _failed_summary(rows)
    by_point = _groups([r for r in rows if not r.failed], lambda r: (r.sigma1, r.sigma2, r.t2))
    spec_c, univ_c = 0.0, 0.0
    per_regime = {}
    for (xi, sigma, t), grp in by_point.items():
        s = complex(sigma, t)
        regime, mains, scale, universal = hl_estimates(xi, s)
        for r in grp:
            part = 0 if r.method.startswith("cosine") else 1
            dev = abs(r.value - mains[part]) / scale
            uni = abs(r.value) / universal
            spec_c, univ_c = max(spec_c, dev), max(univ_c, uni)
            per_regime[regime] = max(per_regime.get(regime, 0.0), dev)
            points.append({"xi": xi, "s": [sigma, t], "part": "C" if part == 0 else "S",
                           "regime": regime, "measured": abs(r.value - mains[part]),
                           "predicted": scale, "ratio": dev, "universal_ratio": uni})
    per_regime["HL-5"] = max(per_regime.get("HL-5", 0.0), univ_c)
    constant = max(spec_c, univ_c)
    spots = []
    n_spot = int(config.get("spot_checks", 0))
    keys = list(by_point)
    if n_spot and keys:
        for idx in np.linspace(0, len(keys) - 1, min(n_spot, len(keys))).astype(int):
            xi, sigma, t = keys[idx]
            cq, sq = quadrature_oscillatory(xi, complex(sigma, t))
            ours = {("cosine" if r.method.startswith("cosine") else "sine"): r.value for r in by_point[keys[idx]]}
            err = max(abs(ours["cosine"] - cq), abs(ours["sine"] - sq))
            spots.append({"xi": xi, "s": [sigma, t], "abs_error": err})
    spot_tol = config.get("spot_tolerance", 1e-7)
    spot_ok = all(sp["abs_error"] <= spot_tol for sp in spots)
    summary = {
        "constant": constant,
        "limit": limit,
        "per_regime": per_regime,
        "regimes_seen": sorted(per_regime),
        "spot_checks": spots,
        "failed_points": failed,
    }
    passed = bool(points) and constant <= limit and spot_ok and not failed
    return Report("hl", points, summary, passed)


_REPORTERS = {
    "theorem1": lambda rows, cfg: _theorem_report(rows, cfg, "theorem1"),
    "theorem2": lambda rows, cfg: _theorem_report(rows, cfg, "theorem2"),
    "lemma21": _lemma21_report,
    "lemma22": _lemma22_report,
    "hl": _hl_report,
}


def primitive_count_formula(q):
    """Number of primitive characters mod q from the multiplicative formula."""
    count = 1
    for p, k in factorize(q):
        if k == 1:
            count *= p - 2
        else:
            count *= p ** (k - 2) * (p - 1) ** 2
    return count


__all__ = [
    "COLUMNS",
    "BoundModel",
    "ConfigError",
    "FitResult",
    "Ladder",
    "Record",
    "Report",
    "SweepFailed",
    "SweepSpec",
    "build_table",
    "theorem1_model",
    "theorem2_model",
    "fit_exponent",
    "primitive_count_formula",
    "read_table",
    "run_sweep",
    "verify_bounds",
    "write_table",
]
