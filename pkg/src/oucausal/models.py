"""Ornstein-Uhlenbeck models, the coordinate-pinning intervention calculus,
and dependence-graph extraction.

A model is the SDE dX = B (X - A) dt + sigma dW with state dimension p and
d-dimensional driving Brownian motion. Pinning coordinate m to the constant
c substitutes c for X^m in the drift of every other coordinate and deletes
the m'th equation, which yields the (p-1)-dimensional model with

    mean reversion speed  B~      (B with row and column m deleted)
    diffusion             sigma~  (sigma with row m deleted)
    mean reversion level  A~ = alpha - B~^{-1} beta,

where alpha is A without coordinate m and beta_i = b_im (c - a_m) for
i != m. Coordinate indices are 1-based on every user-facing surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import matkit
from .errors import (
    BadCoordinateError,
    DimensionError,
    DuplicateInterventionError,
    NonFiniteError,
    SingularMatrixError,
    SingularReducedMatrixError,
)


def default_labels(p: int) -> tuple[str, ...]:
    return tuple(f"X{i}" for i in range(1, p + 1))


@dataclass(frozen=True)
class OuModel:
    """Validated Ornstein-Uhlenbeck model (x0, A, B, sigma) with labels.

    Fields
    ------
    p, d : state and noise dimensions (both >= 1)
    x0   : initial value, length p
    A    : mean reversion level, length p
    B    : mean reversion speed, p x p
    sigma: diffusion matrix, p x d
    labels: p distinct coordinate names, default "X1".."Xp"
    """

    p: int
    d: int
    x0: np.ndarray
    A: np.ndarray
    B: np.ndarray
    sigma: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 1:
            raise DimensionError(f"p must be a positive integer, got {self.p!r}")
        if not isinstance(self.d, int) or self.d < 1:
            raise DimensionError(f"d must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "x0", matkit.as_vector(self.x0, self.p, "x0"))
        object.__setattr__(self, "A", matkit.as_vector(self.A, self.p, "A"))
        object.__setattr__(self, "B", matkit.as_matrix(self.B, self.p, self.p, "B"))
        object.__setattr__(
            self, "sigma", matkit.as_matrix(self.sigma, self.p, self.d, "sigma")
        )
        labels = tuple(self.labels) if self.labels else default_labels(self.p)
        if len(labels) != self.p:
            raise DimensionError(f"labels: expected {self.p} names, got {len(labels)}")
        if len(set(labels)) != self.p:
            raise DimensionError("labels must be distinct")
        object.__setattr__(self, "labels", labels)

    def drift(self, x: np.ndarray) -> np.ndarray:
        """Drift B (x - A) at state x."""
        return self.B @ (np.asarray(x, dtype=float) - self.A)

    def label_index(self, label: str) -> int:
        """1-based index of a coordinate label."""
        try:
            return self.labels.index(label) + 1
        except ValueError:
            raise BadCoordinateError(f"unknown coordinate label {label!r}")


@dataclass(frozen=True)
class Intervention:
    """Pin coordinate m (1-based) to the constant value c."""

    m: int
    c: float

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise BadCoordinateError(f"m must be a positive integer, got {self.m!r}")
        c = float(self.c)
        if not np.isfinite(c):
            raise NonFiniteError(f"intervention value must be finite, got {c!r}")
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class InterventionRecord:
    """Traceability between original and reduced coordinates.

    `surviving` lists the original 1-based indices still present, in order;
    `fixed` lists (label, value) pairs in the order they were pinned. The
    two index maps implied by `surviving` are mutually inverse bijections.
    """

    original_labels: tuple[str, ...]
    fixed: tuple[tuple[str, float], ...] = ()
    surviving: tuple[int, ...] = ()

    @classmethod
    def fresh(cls, labels: Sequence[str]) -> "InterventionRecord":
        return cls(tuple(labels), (), tuple(range(1, len(labels) + 1)))

    @property
    def fixed_labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.fixed)

    def is_fixed(self, original_index: int) -> bool:
        return self.original_labels[original_index - 1] in self.fixed_labels

    def to_current(self, original_index: int) -> int:
        """Map an original 1-based index to its current position."""
        if not 1 <= original_index <= len(self.original_labels):
            raise BadCoordinateError(
                f"coordinate {original_index} outside 1..{len(self.original_labels)}"
            )
        if self.is_fixed(original_index):
            raise DuplicateInterventionError(
                f"coordinate {self.original_labels[original_index - 1]!r} "
                "was already pinned"
            )
        return self.surviving.index(original_index) + 1

    def to_original(self, current_index: int) -> int:
        """Map a current 1-based index back to the original coordinates."""
        if not 1 <= current_index <= len(self.surviving):
            raise BadCoordinateError(
                f"coordinate {current_index} outside 1..{len(self.surviving)}"
            )
        return self.surviving[current_index - 1]

    def pin(self, current_index: int, value: float) -> "InterventionRecord":
        """Record pinning the coordinate at `current_index` to `value`."""
        orig = self.to_original(current_index)
        label = self.original_labels[orig - 1]
        return InterventionRecord(
            self.original_labels,
            self.fixed + ((label, float(value)),),
            tuple(i for i in self.surviving if i != orig),
        )

    def lift(self, reduced: np.ndarray) -> np.ndarray:
        """Embed reduced states back into the original coordinates.

        The last axis of `reduced` must have length len(surviving); pinned
        coordinates are filled with their constant values.
        """
        reduced = np.asarray(reduced, dtype=float)
        p = len(self.original_labels)
        if reduced.shape[-1] != len(self.surviving):
            raise DimensionError(
                f"expected last axis {len(self.surviving)}, got {reduced.shape[-1]}"
            )
        out = np.empty(reduced.shape[:-1] + (p,), dtype=float)
        for k, orig in enumerate(self.surviving):
            out[..., orig - 1] = reduced[..., k]
        for label, value in self.fixed:
            out[..., self.original_labels.index(label)] = value
        return out

    def as_dict(self) -> dict:
        return {
            "original_labels": list(self.original_labels),
            "fixed": [{"label": lab, "value": val} for lab, val in self.fixed],
            "surviving_labels": [
                self.original_labels[i - 1] for i in self.surviving
            ],
        }


def _reduce_once(
    model: OuModel, m: int, c: float, record: InterventionRecord
) -> tuple[OuModel, InterventionRecord]:
    """One pinning step on the model's current coordinates (m is 1-based)."""
    if model.p < 2:
        raise DimensionError("cannot pin a coordinate of a 1-dimensional model")
    if not 1 <= m <= model.p:
        raise BadCoordinateError(f"coordinate {m} outside 1..{model.p}")
    keep = [i for i in range(model.p) if i != m - 1]
    b_red = model.B[np.ix_(keep, keep)]
    alpha = model.A[keep]
    beta = model.B[keep, m - 1] * (c - model.A[m - 1])
    try:
        correction = matkit.solve_linear(b_red, beta)
    except SingularMatrixError as exc:
        raise SingularReducedMatrixError(
            f"reduced mean-reversion block is singular after pinning "
            f"coordinate {model.labels[m - 1]!r}: {exc}"
        )
    reduced = OuModel(
        p=model.p - 1,
        d=model.d,
        x0=model.x0[keep],
        A=alpha - correction,
        B=b_red,
        sigma=model.sigma[keep, :],
        labels=tuple(model.labels[i] for i in keep),
    )
    return reduced, record.pin(m, c)


def intervene_ou(model: OuModel, iv: Intervention) -> tuple[OuModel, InterventionRecord]:
    """Pin one coordinate of an OU model; returns the reduced model and record.

    Raises SingularReducedMatrixError when the reduced mean-reversion block
    is not invertible and BadCoordinateError when iv.m is out of range.
    """
    return _reduce_once(model, iv.m, iv.c, InterventionRecord.fresh(model.labels))


def intervene_seq(
    model: OuModel, ivs: Iterable[Intervention]
) -> tuple[OuModel, InterventionRecord]:
    """Left-to-right fold of single pinnings.

    Indices are interpreted against the ORIGINAL coordinates and resolved
    through the running record, so "pin X3 then X1" keeps its meaning after
    the first reduction. Pinning the same original coordinate twice raises
    DuplicateInterventionError; a singular reduced block raises
    SingularReducedMatrixError carrying the 1-based stage index.
    """
    record = InterventionRecord.fresh(model.labels)
    current = model
    for stage, iv in enumerate(ivs, start=1):
        if not 1 <= iv.m <= len(record.original_labels):
            raise BadCoordinateError(
                f"stage {stage}: coordinate {iv.m} outside "
                f"1..{len(record.original_labels)}"
            )
        m_now = record.to_current(iv.m)
        try:
            current, record = _reduce_once(current, m_now, iv.c, record)
        except SingularReducedMatrixError as exc:
            raise SingularReducedMatrixError(f"stage {stage}: {exc}", stage=stage)
    return current, record


@dataclass(frozen=True)
class DependenceGraph:
    """Directed dependence graph: edge u -> v means u's level enters v's drift."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def to_dot(self) -> str:
        """DOT rendering; node order and edge order are deterministic."""
        lines = ["digraph G {"]
        for node in self.nodes:
            lines.append(f'  "{node}";')
        for src, dst in self.edges:
            lines.append(f'  "{src}" -> "{dst}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def dependence_graph(model: OuModel, tol: float = 0.0) -> DependenceGraph:
    """Graph on the model's p coordinates from the sparsity of B.

    Edge j -> i (including self-loops) iff |b_ij| > tol. The default tol of 0
    reads exact structural zeros, so the graph reflects model structure
    rather than numerics. Edges are listed row-major in B.
    """
    if tol < 0:
        raise DimensionError("tol must be nonnegative")
    edges = []
    for i in range(model.p):
        for j in range(model.p):
            if abs(model.B[i, j]) > tol:
                edges.append((model.labels[j], model.labels[i]))
    return DependenceGraph(model.labels, tuple(edges))


def intervened_dependence_graph(
    model: OuModel, ivs: Intervention | Iterable[Intervention], tol: float = 0.0
) -> DependenceGraph:
    """Graph of the pinned process on all p original coordinates.

    A pinned node keeps its outgoing edges (its constant level still enters
    the drift of other coordinates) but loses its incoming edges and its
    self-loop. The graph of the reduced (p-1)-dimensional model itself is
    `dependence_graph(reduced)`; this view keeps the pinned nodes visible.
    """
    if isinstance(ivs, Intervention):
        ivs = [ivs]
    pinned = set()
    for iv in ivs:
        if not 1 <= iv.m <= model.p:
            raise BadCoordinateError(f"coordinate {iv.m} outside 1..{model.p}")
        if iv.m in pinned:
            raise DuplicateInterventionError(
                f"coordinate {model.labels[iv.m - 1]!r} pinned twice"
            )
        pinned.add(iv.m)
    edges = []
    for i in range(model.p):
        if i + 1 in pinned:
            continue
        for j in range(model.p):
            if abs(model.B[i, j]) > tol:
                edges.append((model.labels[j], model.labels[i]))
    return DependenceGraph(model.labels, tuple(edges))


@dataclass(frozen=True)
class GeneralSde:
    """SDE dX = a(X-) dZ with a caller-supplied coefficient function.

    `coef` maps a state vector of length p to a p x d matrix. The driver Z
    has d components; for simulation Z is specialized to (t, W), i.e. the
    first component is time and the remaining d-1 are independent Brownian
    motions. The coefficient must be total on R^p and Lipschitz; neither is
    checked. The callable is invoked from the thread that owns the object.
    """

    p: int
    d: int
    x0: np.ndarray
    coef: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 1:
            raise DimensionError(f"p must be a positive integer, got {self.p!r}")
        if not isinstance(self.d, int) or self.d < 1:
            raise DimensionError(f"d must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "x0", matkit.as_vector(self.x0, self.p, "x0"))
        if not callable(self.coef):
            raise DimensionError("coef must be callable")

    def coef_at(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the coefficient and validate its shape."""
        return matkit.as_matrix(self.coef(np.asarray(x, dtype=float)),
                                self.p, self.d, "coef(x)")


def ou_as_general(model: OuModel) -> GeneralSde:
    """View an OU model as a general SDE driven by Z = (t, W).

    The coefficient is the p x (1 + d) matrix [B (x - A) | sigma]: column 1
    multiplies dt, the remaining columns multiply dW.
    """

    def coef(x: np.ndarray) -> np.ndarray:
        return np.column_stack([model.B @ (x - model.A), model.sigma])

    return GeneralSde(model.p, 1 + model.d, model.x0, coef)


def intervene_general(sde: GeneralSde, iv: Intervention) -> GeneralSde:
    """Pin coordinate m of a general SDE to the constant c.

    The reduced coefficient evaluates the original one with c inserted at
    position m and drops row m; the initial value drops coordinate m.
    """
    if sde.p < 2:
        raise DimensionError("cannot pin a coordinate of a 1-dimensional SDE")
    if not 1 <= iv.m <= sde.p:
        raise BadCoordinateError(f"coordinate {iv.m} outside 1..{sde.p}")
    m, c = iv.m, iv.c
    keep = [i for i in range(sde.p) if i != m - 1]
    inner = sde.coef

    def coef(y: np.ndarray) -> np.ndarray:
        x = np.insert(np.asarray(y, dtype=float), m - 1, c)
        return np.asarray(inner(x), dtype=float)[keep, :]

    return GeneralSde(sde.p - 1, sde.d, sde.x0[keep], coef)
