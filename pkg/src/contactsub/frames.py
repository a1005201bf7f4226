"""phi-adapted orthonormal frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import ChartPatch, eval_metric
from .errors import DegenerateInput, OddDimensionMismatch
from .linalg import gram_schmidt

__all__ = ["OrthoFrame", "phi_adapted_frame", "complement_basis"]

PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class OrthoFrame:
    """Orthonormal frame at a point.

    ``tags[a]`` is one of ``"X"``, ``"phiX"``, ``"V"``, ``"phiV"``, ``"xi"``;
    a ``"phiX"`` (``"phiV"``) entry always directly follows its partner.
    """

    base_point: np.ndarray
    vectors: np.ndarray  # rows
    tags: tuple

    @property
    def matrix(self) -> np.ndarray:
        """Frame vectors as columns."""
        return self.vectors.T

    def select(self, *kinds: str) -> np.ndarray:
        return np.array([v for v, t in zip(self.vectors, self.tags) if t in kinds])

    @property
    def horizontal(self) -> np.ndarray:
        return self.select("X", "phiX")

    @property
    def vertical(self) -> np.ndarray:
        return self.select("V", "phiV", "xi")

    def pairs(self):
        """(first, second) index pairs of the (X, phiX) and (V, phiV) couples."""
        return [(a - 1, a) for a, t in enumerate(self.tags) if t in ("phiX", "phiV")]

    def residuals(self, metric: np.ndarray, phi: np.ndarray) -> tuple[float, float]:
        """(max |g(e_a,e_b) - delta_ab|, max |e_second - phi e_first|)."""
        E = self.matrix
        ortho = float(np.max(np.abs(E.T @ metric @ E - np.eye(E.shape[1]))))
        pair = 0.0
        for a, b in self.pairs():
            pair = max(pair, float(np.max(np.abs(self.vectors[b] - phi @ self.vectors[a]))))
        return ortho, pair


def _residual(v, frame, metric):
    w = np.array(v, dtype=float)
    for _ in range(2):
        for e in frame:
            w = w - (e @ metric @ w) * e
    return w


def _pairs_from(basis, count, frame, metric, phi, tags):
    """Extend ``frame`` by ``count`` vectors, as (e, phi e) couples drawn from ``basis``."""
    out_vecs, out_tags = [], []
    while len(out_vecs) < count:
        current = frame + out_vecs
        residuals = [_residual(v, current, metric) for v in basis]
        norms = [np.sqrt(max(r @ metric @ r, 0.0)) for r in residuals]
        k = int(np.argmax(norms))
        if norms[k] < PIVOT_TOL:
            raise DegenerateInput("span is not phi-invariant or basis is rank deficient")
        e = residuals[k] / norms[k]
        out_vecs += [e, phi @ e]
        out_tags += list(tags)
    return out_vecs, out_tags


def phi_adapted_frame(
    patch: ChartPatch,
    structure,
    p,
    vertical_basis,
    horizontal_basis,
) -> OrthoFrame:
    """Frame {X_i, phi X_i; V_j, phi V_j; xi} from bases of complementary subspaces.

    ``structure`` provides ``endo_at(p)``; if it also has a Reeb field
    (``xi_at``), xi is placed last and must lie in the vertical span.
    Almost Hermitian structures take an empty vertical basis.
    """
    p = np.asarray(p, dtype=float)
    g = eval_metric(patch, p)
    phi = structure.endo_at(p)
    vertical = [np.asarray(v, float) for v in vertical_basis]
    horizontal = [np.asarray(v, float) for v in horizontal_basis]
    has_xi = hasattr(structure, "xi_at")

    if len(horizontal) % 2 != 0 or (has_xi and len(vertical) % 2 != 1) or (
        not has_xi and len(vertical) % 2 != 0
    ):
        raise OddDimensionMismatch(
            f"horizontal/vertical dimensions ({len(horizontal)}, {len(vertical)}) "
            "are not (even, odd)" if has_xi else "dimensions must both be even"
        )
    if vertical + horizontal:
        gram_schmidt(vertical + horizontal, g, PIVOT_TOL)

    frame: list = []
    tags: list = []
    if has_xi:
        xi = np.asarray(structure.xi_at(p), float)
        xi = xi / np.sqrt(xi @ g @ xi)
        vert_on = gram_schmidt(vertical, g, PIVOT_TOL)
        off = xi - sum(((e @ g @ xi) * e for e in vert_on), np.zeros_like(xi))
        if np.sqrt(max(off @ g @ off, 0.0)) > 1e-8:
            raise DegenerateInput("xi is not in the vertical span")
        frame.append(xi)
    vert_vecs, vert_tags = _pairs_from(
        vertical, len(vertical) - len(frame), frame, g, phi, ("V", "phiV")
    )
    hor_vecs, hor_tags = _pairs_from(
        horizontal, len(horizontal), frame + vert_vecs, g, phi, ("X", "phiX")
    )

    vectors = hor_vecs + vert_vecs + frame
    tags = hor_tags + vert_tags + (["xi"] if has_xi else [])
    return OrthoFrame(p, np.array(vectors), tuple(tags))


def complement_basis(metric: np.ndarray, exclude, count: int | None = None) -> list:
    """Basis of the g-orthogonal complement of span(``exclude``) from coordinate vectors."""
    n = metric.shape[0]
    exclude = gram_schmidt([np.asarray(v, float) for v in exclude], metric) if len(exclude) else []
    count = n - len(exclude) if count is None else count
    chosen: list = []
    for _ in range(count):
        frame = exclude + chosen
        best, best_norm = None, -1.0
        for i in range(n):
            r = _residual(np.eye(n)[i], frame, metric)
            nr = np.sqrt(max(r @ metric @ r, 0.0))
            if nr > best_norm:
                best, best_norm = r, nr
        if best_norm < PIVOT_TOL:
            raise DegenerateInput("cannot complete basis")
        chosen.append(best / best_norm)
    return chosen
