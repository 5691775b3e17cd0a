"""Scenario files, the end-to-end pipeline, reports and the on-disk cache.

Scenario files are flat ``key=value`` text, one scenario per file::

    # one block, rotation number -1/100
    n=1
    N=2
    rho=-1/100
    horizon=300
    series_cutoff=-10
    betti=1,0,1

Reports are ordered ``key=value`` blocks, one per stage, separated by a
blank line.  Every value is an integer, a ``p/q`` rational or plain text.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import CacheCorrupt, PipelineError, ScenarioError
from .index_core import (
    RotationNumbers,
    format_rational,
    index_table,
    iteration_identity_check,
    parse_vector,
    to_fraction,
)
from .orbit_search import certify_lemma_arithmetic, find_lemma_iterate
from .qh_engine import (
    cp_n_spec,
    orbit_class_degree,
    product,
    replay_theorem,
    verify_point_identity,
)

log = logging.getLogger(__name__)

_REQUIRED = ("n", "N", "rho", "horizon")
_KNOWN = _REQUIRED + ("series_cutoff", "betti", "omega_generator", "index_bound")


@dataclass(frozen=True)
class Scenario:
    n: int
    N: int
    rho: tuple[Fraction, ...]
    horizon: int
    series_cutoff: Fraction = Fraction(-10)
    betti: tuple[int, ...] | None = None
    omega_generator: Fraction = Fraction(1)
    index_bound: int = 12

    def __post_init__(self) -> None:
        if self.n < 1 or self.N < 1:
            raise ScenarioError("n and N must be positive")
        if self.horizon < 1:
            raise ScenarioError("horizon must be positive")
        if self.index_bound < 1:
            raise ScenarioError("index_bound must be positive")
        if len(self.rho) != self.n:
            raise ScenarioError(f"rho has {len(self.rho)} entries, expected n={self.n}")
        if self.betti is not None and len(self.betti) != 2 * self.n + 1:
            raise ScenarioError(f"betti has {len(self.betti)} entries, expected {2 * self.n + 1}")
        if self.omega_generator <= 0:
            raise ScenarioError("omega_generator must be positive")

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        values: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ScenarioError(f"line {lineno}: expected key=value")
            if key not in _KNOWN:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
            values[key] = value.strip()
        missing = [k for k in _REQUIRED if k not in values]
        if missing:
            raise ScenarioError("missing keys: " + ", ".join(missing))
        try:
            kwargs = dict(
                n=int(values["n"]),
                N=int(values["N"]),
                rho=parse_vector(values["rho"]),
                horizon=int(values["horizon"]),
            )
            if "series_cutoff" in values:
                kwargs["series_cutoff"] = to_fraction(values["series_cutoff"])
            if values.get("betti"):
                kwargs["betti"] = tuple(int(b) for b in values["betti"].split(","))
            if "omega_generator" in values:
                kwargs["omega_generator"] = to_fraction(values["omega_generator"])
            if "index_bound" in values:
                kwargs["index_bound"] = int(values["index_bound"])
        except ZeroDivisionError as exc:
            raise ScenarioError("zero denominator in scenario value") from exc
        except ValueError as exc:
            raise ScenarioError(f"not an integer or rational: {exc}") from exc
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Scenario":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def canonical(self) -> str:
        lines = [
            f"n={self.n}",
            f"N={self.N}",
            "rho=" + ",".join(format_rational(r) for r in self.rho),
            f"horizon={self.horizon}",
            f"series_cutoff={format_rational(self.series_cutoff)}",
            "betti=" + ("" if self.betti is None else ",".join(map(str, self.betti))),
            f"omega_generator={format_rational(self.omega_generator)}",
            f"index_bound={self.index_bound}",
        ]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def cache_key(self) -> str:
        return hashlib.sha256(f"toric_qh {__version__}\n{self.canonical()}".encode()).hexdigest()


@dataclass
class Report:
    """Ordered stage blocks; the machine rendering is the canonical form."""

    blocks: list[tuple[str, list[tuple[str, str]]]] = field(default_factory=list)

    def add(self, stage: str, items: list[tuple[str, object]]) -> None:
        self.blocks.append((stage, [(k, _render(v)) for k, v in items]))

    def stage(self, name: str) -> dict[str, str]:
        for stage, items in self.blocks:
            if stage == name:
                return dict(items)
        raise KeyError(name)

    @property
    def verdict(self) -> str:
        try:
            return self.stage("theorem")["status"]
        except KeyError:
            return "skipped"

    @property
    def exit_code(self) -> int:
        return 2 if self.verdict == "contradiction" else 0

    def machine(self) -> str:
        chunks = []
        for stage, items in self.blocks:
            lines = [f"stage={stage}"] + [f"{k}={v}" for k, v in items]
            chunks.append("\n".join(lines))
        return "\n\n".join(chunks) + "\n"

    def human(self) -> str:
        out = []
        for stage, items in self.blocks:
            out.append(f"== {stage} ==")
            width = max((len(k) for k, _ in items), default=0)
            for k, v in items:
                out.append(f"  {k.ljust(width)}  {v}")
            out.append("")
        return "\n".join(out)

    @classmethod
    def from_machine(cls, text: str) -> "Report":
        report = cls()
        for chunk in text.strip("\n").split("\n\n"):
            lines = chunk.split("\n")
            key, _, stage = lines[0].partition("=")
            if key != "stage":
                raise ValueError("report block does not start with stage=")
            items = []
            for line in lines[1:]:
                k, sep, v = line.partition("=")
                if not sep:
                    raise ValueError(f"malformed report line {line!r}")
                items.append((k, v))
            report.blocks.append((stage, items))
        return report


def _render(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return ",".join(_render(v) for v in value)
    if value is None:
        return "none"
    if isinstance(value, float):
        raise TypeError("reports never carry floating point values")
    return str(value)


def _index_stage(sc: Scenario, path: RotationNumbers) -> list[tuple[str, object]]:
    items: list[tuple[str, object]] = [("kmax", sc.index_bound)]
    identity_ok = True
    base_ok = path.is_nondegenerate(1)
    for k, mu, mean in index_table(path, sc.index_bound):
        items.append((f"mu_{k}", mu if mu is not None else "degenerate"))
        items.append((f"mean_{k}", mean))
        if base_ok and mu is not None:
            identity_ok &= iteration_identity_check(path, k)
    items.append(("iteration_identity", identity_ok if base_ok else "not-applicable"))
    return items


def _lemma_stage(sc: Scenario, path: RotationNumbers) -> list[tuple[str, object]]:
    w = find_lemma_iterate(path, sc.N, sc.horizon)
    n = sc.n
    residue = orbit_class_degree(n, sc.N, w.mu_m)
    arithmetic = all(certify_lemma_arithmetic(n, w.d, r) for r in range(1, w.r_max + 1))
    spec = cp_n_spec(n, sc.omega_generator)
    pt = spec.point_class()
    acc = pt
    nonzero = True
    for _ in range(2, w.r_max + 1):
        acc = product(spec, acc, pt)
        if acc.is_zero():
            nonzero = False
            break
    return [
        ("m", w.m),
        ("d", w.d),
        ("loop", w.loop),
        ("loop_expected", -2 * n + w.d),
        ("mu_m", w.mu_m),
        ("lambda", w.lambdas),
        ("window_width", w.width),
        ("r_max", w.r_max),
        ("extremal_certified", f"1..{w.r_max}" if w.all_certified else "failed"),
        ("extremal_all", w.all_certified),
        ("lemma_arithmetic", arithmetic),
        ("orbit_class_residue", residue),
        ("point_slot", residue == 0),
        ("point_powers_nonzero", nonzero),
    ]


def _eq2_stage(sc: Scenario) -> list[tuple[str, object]]:
    spec = cp_n_spec(sc.n, sc.omega_generator)
    rep = verify_point_identity(spec)
    items: list[tuple[str, object]] = [
        ("ring", spec.name),
        ("N", spec.N),
        ("holds", rep.holds),
        ("alpha", rep.alpha.to_token() if rep.alpha is not None else None),
        ("alpha_text", rep.alpha.to_text() if rep.alpha is not None else None),
        ("alpha_renamed", rep.alpha_renamed(spec.omega0).to_text() if rep.alpha is not None else None),
        ("alpha_invertible", rep.alpha_invertible),
        ("alpha_degree", rep.alpha_degree),
        ("expected_degree", rep.expected_degree),
    ]
    if rep.alpha_invertible:
        inv = rep.alpha.inverse(sc.series_cutoff)
        check = rep.alpha * inv
        items.append(("alpha_inverse", inv.to_token()))
        items.append(("alpha_inverse_checked", check == spec.one()))
    return items


def _theorem_stage(sc: Scenario) -> list[tuple[str, object]]:
    v = replay_theorem(sc.n, sc.N, sc.betti)
    return [
        ("status", v.status),
        ("reason", v.reason),
        ("forced", ";".join(f"{d}:{k}" for d, k in v.forced) or None),
        ("violations", ";".join(f"{d}:{b}" for d, b in v.violations) or None),
        ("ambiguous", v.ambiguous or None),
        ("conclusion", v.conclusion or None),
        ("notes", " / ".join(v.notes) or None),
    ]


def run_pipeline(sc: Scenario) -> Report:
    """Index table, lemma witness, point identity on CP^n, theorem replay."""
    path = RotationNumbers(sc.rho)
    report = Report()
    report.add("scenario", [
        ("toolkit_version", __version__),
        ("scenario_hash", sc.digest()),
        *[tuple(line.split("=", 1)) for line in sc.canonical().splitlines()],
    ])
    stages = [
        ("index", lambda: _index_stage(sc, path)),
        ("lemma", lambda: _lemma_stage(sc, path)),
        ("eq2", lambda: _eq2_stage(sc)),
    ]
    if sc.betti is not None:
        stages.append(("theorem", lambda: _theorem_stage(sc)))
    for name, fn in stages:
        try:
            items = fn()
        except Exception as exc:  # attributed and re-raised
            raise PipelineError(name, exc) from exc
        report.add(name, items)
    if sc.betti is None:
        report.add("theorem", [("status", "skipped")])
    return report


# -- cache ------------------------------------------------------------------

def _entry_path(cache_dir: str | os.PathLike, key: str) -> Path:
    return Path(cache_dir) / f"{key}.report"


def cache_store(cache_dir: str | os.PathLike, key: str, report: Report) -> Path:
    """Write ``report`` atomically (temp file then rename)."""
    directory = Path(cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    body = report.machine()
    digest = hashlib.sha256(body.encode()).hexdigest()
    target = _entry_path(directory, key)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".report")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"key={key}\nsha256={digest}\n{body}")
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def _read_entry(path: Path, key: str) -> Report:
    text = path.read_text(encoding="utf-8")
    head1, _, rest = text.partition("\n")
    head2, _, body = rest.partition("\n")
    if head1 != f"key={key}" or not head2.startswith("sha256="):
        raise CacheCorrupt(f"{path}: bad header")
    if hashlib.sha256(body.encode()).hexdigest() != head2[len("sha256="):]:
        raise CacheCorrupt(f"{path}: hash mismatch")
    try:
        return Report.from_machine(body)
    except ValueError as exc:
        raise CacheCorrupt(f"{path}: {exc}") from exc


def cache_lookup(cache_dir: str | os.PathLike, key: str) -> Report | None:
    path = _entry_path(cache_dir, key)
    if not path.exists():
        return None
    try:
        return _read_entry(path, key)
    except (CacheCorrupt, UnicodeDecodeError) as exc:
        log.warning("ignoring corrupt cache entry: %s", exc)
        return None


def run_cached(sc: Scenario, cache_dir: str | os.PathLike | None) -> Report:
    if cache_dir is None:
        return run_pipeline(sc)
    key = sc.cache_key()
    hit = cache_lookup(cache_dir, key)
    if hit is not None:
        return hit
    report = run_pipeline(sc)
    cache_store(cache_dir, key, report)
    return report
