"""Finite sections of infinite sampling sequences.

An infinite point sequence ``X = (x_n)`` is only ever represented by its
nested prefixes. Sampling functions, reconstructions and diagnostics are
computed on the leading ``n x n`` section of the kernel matrix.

:func:`determining_diagnostic` watches how the sections behave as ``n``
grows. Its verdict is a heuristic; no finite computation certifies that a
sequence is determining.
"""

import csv
import io
import json
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_array2d
from .exceptions import NotPositiveDefiniteError, NumericalError
from .linalg import PointSet, assemble_gram, pd_threshold, riesz_constants
from .sampling import biorthogonality_residual, fit_gram, lagrange_basis

__all__ = [
    "PointSequence",
    "TruncationReport",
    "truncated_dual",
    "truncated_reconstruct",
    "determining_diagnostic",
    "STABLE_MARGIN",
]

# "stable" requires lambda_min of the largest section to clear the PD
# threshold by this factor.
STABLE_MARGIN = 1e3


class PointSequence:
    """A (possibly infinite) sequence of distinct points, emitted by prefix.

    Build one with :meth:`explicit`, :meth:`lattice` or :meth:`random`.
    Prefixes are nested: ``prefix(n)`` is the start of ``prefix(m)`` for
    ``n <= m``. Emitted points are cached and the cache only grows.
    """

    def __init__(self, dim, generate, length=None, description=None):
        self.dim = dim
        self.length = length
        self.description = description or {}
        self._generate = generate
        self._cache = np.empty((0, dim))
        self._lock = threading.Lock()

    @classmethod
    def explicit(cls, points):
        pts = PointSet(points)
        coords = pts.coords

        def generate(cache, n):
            return coords[:n]

        return cls(pts.dim, generate, length=len(pts), description={"type": "explicit", "points": coords.tolist()})

    @classmethod
    def lattice(cls, h=1.0, dim=1):
        """Integer lattice scaled by ``h``, in order of increasing norm.

        Ties are broken lexicographically, so on the line the order is
        ``0, -h, h, -2h, 2h, ...``.
        """
        h = float(h)
        if not h > 0:
            raise ValueError("lattice spacing h must be positive")
        state = {"radius": 0, "ints": np.zeros((1, dim), dtype=np.int64)}

        def generate(cache, n):
            while True:
                R = state["radius"]
                ints = state["ints"]
                complete = int(np.sum(np.sum(ints * ints, axis=1) <= R * R))
                if complete >= n:
                    return ints[:n].astype(np.float64) * h
                R = max(1, 2 * R)
                axes = [np.arange(-R, R + 1)] * dim
                grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
                norms = np.sum(grid * grid, axis=1)
                keys = [grid[:, a] for a in range(dim - 1, -1, -1)] + [norms]
                state["ints"] = grid[np.lexsort(keys)]
                state["radius"] = R

        return cls(dim, generate, description={"type": "lattice", "h": h, "dim": dim})

    @classmethod
    def random(cls, delta, dim=1, box=None, seed=0xC0FFEE, max_tries=100000):
        """Seeded uniform points in ``[0, box]^dim`` with separation ``>= delta``.

        Candidates closer than ``delta`` to an accepted point are rejected.
        ``box`` defaults to ``10 * delta``.
        """
        delta = float(delta)
        if not delta > 0:
            raise ValueError("minimum separation delta must be positive")
        box = 10 * delta if box is None else float(box)
        rng = np.random.default_rng(seed)

        def generate(cache, n):
            pts = list(cache)
            while len(pts) < n:
                for _ in range(max_tries):
                    cand = rng.uniform(0.0, box, size=dim)
                    if not pts or np.min(np.sum((np.asarray(pts) - cand) ** 2, axis=1)) >= delta * delta:
                        pts.append(cand)
                        break
                else:
                    raise RuntimeError(
                        f"could not place point {len(pts) + 1} with separation {delta} in box {box}"
                    )
            return np.asarray(pts, dtype=np.float64).reshape(-1, dim)

        return cls(
            dim,
            generate,
            description={"type": "random", "delta": delta, "dim": dim, "box": box, "seed": int(seed)},
        )

    @classmethod
    def from_dict(cls, data, seed=0xC0FFEE):
        """Build a sequence from a generator description (the CLI format)."""
        data = dict(data)
        kind = data.pop("type", None)
        if kind == "explicit":
            _only(data, {"points"})
            return cls.explicit(check_array2d(data["points"]))
        if kind == "lattice":
            _only(data, {"h", "dim"})
            return cls.lattice(data.get("h", 1.0), int(data.get("dim", 1)))
        if kind == "random":
            _only(data, {"delta", "dim", "box", "seed"})
            return cls.random(
                data["delta"], int(data.get("dim", 1)), data.get("box"), int(data.get("seed", seed))
            )
        raise ValueError(f"unknown generator type {kind!r}; expected 'explicit', 'lattice' or 'random'")

    def prefix(self, n):
        """The first ``n`` points as a PointSet."""
        n = int(n)
        if n < 1:
            raise IndexError("prefix size must be at least 1")
        if self.length is not None and n > self.length:
            raise IndexError(f"sequence has only {self.length} points, asked for {n}")
        if len(self._cache) < n:
            with self._lock:
                if len(self._cache) < n:
                    self._cache = self._generate(self._cache, n).copy()
        out = PointSet.__new__(PointSet)
        coords = self._cache[:n].copy()
        coords.setflags(write=False)
        out.coords = coords
        return out


def _only(data, allowed):
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown generator keys: {', '.join(unknown)}")


def truncated_dual(k, seq, n, idx):
    """Sampling function ``L_idx`` computed on the leading ``n x n`` section (0-based ``idx``)."""
    if not 0 <= idx < n:
        raise IndexError(f"index {idx} out of range 0..{n - 1}")
    G = assemble_gram(k, seq.prefix(n))
    return lagrange_basis(G, idx)


def truncated_reconstruct(k, seq, samples, n):
    """Reconstruct from the first ``n`` samples: ``sum_{k<n} f(x_k) L_k^(n)``."""
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    if samples.size < n:
        raise IndexError(f"need at least {n} samples, got {samples.size}")
    G = assemble_gram(k, seq.prefix(n))
    return fit_gram(G, samples[:n])


@dataclass
class TruncationReport:
    """Per-section diagnostics for a growing sequence of finite sections.

    ``dual_drift[i]`` is the native-norm distance between the first sampling
    function on section ``sizes[i]`` and on section ``sizes[i-1]``; the first
    entry is ``nan``. ``failed_size`` is set when Cholesky broke down on a
    section, in which case that section is not listed.
    """

    sizes: list = field(default_factory=list)
    condition_numbers: list = field(default_factory=list)
    lambda_mins: list = field(default_factory=list)
    biortho_residuals: list = field(default_factory=list)
    dual_drift: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)
    verdict: str = "inconclusive"
    failed_size: int = None
    failed_pivot: int = None

    def to_dict(self):
        def clean(values):
            return [None if (v is None or math.isnan(v)) else float(v) for v in values]

        return {
            "sizes": [int(n) for n in self.sizes],
            "lambda_mins": clean(self.lambda_mins),
            "condition_numbers": clean(self.condition_numbers),
            "biortho_residuals": clean(self.biortho_residuals),
            "dual_drift": clean(self.dual_drift),
            "pd_thresholds": clean(self.thresholds),
            "verdict": self.verdict,
            "failed_size": self.failed_size,
            "failed_pivot": self.failed_pivot,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "lambda_min", "condition", "biortho_residual", "dual_drift"])
        for row in zip(self.sizes, self.lambda_mins, self.condition_numbers, self.biortho_residuals, self.dual_drift):
            writer.writerow([str(int(row[0]))] + ["" if math.isnan(v) else repr(float(v)) for v in row[1:]])
        return buf.getvalue()


def _verdict(report, margin):
    if report.failed_size is not None:
        return "degrading"
    lam = report.lambda_mins
    if len(lam) < 2:
        return "inconclusive"
    margin_ok = lam[-1] >= margin * report.thresholds[-1]
    if not margin_ok and lam[-1] < lam[0]:
        return "degrading"
    drifts = [d for d in report.dual_drift[-3:] if not math.isnan(d)]
    if margin_ok and len(report.sizes) >= 3 and all(b < a for a, b in zip(drifts, drifts[1:])):
        return "stable"
    return "inconclusive"


def determining_diagnostic(k, seq, sizes, margin=STABLE_MARGIN):
    """Finite-section diagnostics suggesting whether ``seq`` is determining for ``k``.

    For each section size ``n`` this records the smallest eigenvalue and the
    condition number of ``A_n``, the biorthogonality residual, and the drift
    of the first sampling function. Verdicts:

    * ``stable`` -- at least three sizes, the largest section's smallest
      eigenvalue is ``margin`` times above the PD threshold, and the
      drift strictly decreases over the last three sections;
    * ``degrading`` -- a section failed Cholesky, or the smallest eigenvalue
      fell below that margin while shrinking;
    * ``inconclusive`` -- anything else, including a single size.
    """
    sizes = [int(n) for n in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] < 1:
        raise ValueError("sizes must be a non-empty strictly increasing list of positive integers")
    if sizes[-1] > 2048:
        raise ValueError("largest section exceeds the eigensolver budget of 2048")
    report = TruncationReport()
    prev_coeffs = None
    for n in sizes:
        G = assemble_gram(k, seq.prefix(n))
        try:
            G.chol
            bounds = riesz_constants(G)
        except NotPositiveDefiniteError as exc:
            report.failed_size = n
            report.failed_pivot = exc.pivot
            break
        except NumericalError:
            report.failed_size = n
            break
        L = lagrange_basis(G, 0)
        if prev_coeffs is None:
            drift = float("nan")
        else:
            delta = L.coeffs.copy()
            delta[: prev_coeffs.size] -= prev_coeffs
            drift = math.sqrt(max(float(delta @ (G.entries @ delta)), 0.0))
        prev_coeffs = L.coeffs
        report.sizes.append(n)
        report.lambda_mins.append(bounds.lambda_min)
        report.condition_numbers.append(bounds.condition)
        report.biortho_residuals.append(biorthogonality_residual(G))
        report.dual_drift.append(drift)
        report.thresholds.append(pd_threshold(n, float(np.max(np.diag(G.entries)))))
    report.verdict = _verdict(report, margin)
    return report
