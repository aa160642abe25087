"""Affine forms over a flat real variable vector and a cone-program builder."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..solver.program import ConeLayout, ConicProgram


class Affine:
    """``sum(val[i] * x[idx[i]]) + const``; duplicate indices are summed."""

    __slots__ = ("idx", "val", "const")

    def __init__(self, idx=(), val=(), const=0.0):
        self.idx = np.asarray(idx, dtype=np.intp).ravel()
        self.val = np.asarray(val, dtype=float).ravel()
        self.const = float(const)

    @classmethod
    def var(cls, i: int, coef: float = 1.0) -> "Affine":
        return cls([i], [coef])

    @classmethod
    def constant(cls, value: float) -> "Affine":
        return cls(const=value)

    @classmethod
    def block(cls, start: int, coef) -> "Affine":
        coef = np.asarray(coef, dtype=float)
        return cls(np.arange(start, start + coef.size), coef)

    def __add__(self, other):
        if isinstance(other, Affine):
            return Affine(np.concatenate([self.idx, other.idx]),
                          np.concatenate([self.val, other.val]), self.const + other.const)
        return Affine(self.idx, self.val, self.const + float(other))

    __radd__ = __add__

    def __neg__(self):
        return Affine(self.idx, -self.val, -self.const)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        k = float(k)
        return Affine(self.idx, self.val * k, self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / float(k))

    def __call__(self, x) -> float:
        return float(np.dot(self.val, np.asarray(x)[self.idx]) + self.const)

    def __repr__(self):
        return f"Affine(nnz={self.idx.size}, const={self.const:g})"


class ProgramBuilder:
    """Collects ``f(x) == 0``, ``f(x) >= 0`` and ``(f0, f1..) in SOC`` rows."""

    def __init__(self, nvars: int, names=None):
        self.n = nvars
        self.names = names
        self.eq: list[Affine] = []
        self.nonneg: list[Affine] = []
        self.soc: list[list[Affine]] = []
        self.tags: dict[str, int] = {}
        self._where: list[tuple[str, str, int]] = []
        # tag -> first program row of every constraint with that tag (filled by build)
        self.row_map: dict[str, list[int]] = {}

    def _tag(self, tag, kind, pos):
        if tag:
            self.tags[tag] = self.tags.get(tag, 0) + 1
            self._where.append((tag, kind, pos))

    def add_eq(self, f: Affine, tag: str = ""):
        self.eq.append(f)
        self._tag(tag, "eq", len(self.eq) - 1)

    def add_ge(self, lhs, rhs=0.0, tag: str = ""):
        """``lhs >= rhs``."""
        self.nonneg.append(_as_affine(lhs) - rhs)
        self._tag(tag, "nonneg", len(self.nonneg) - 1)

    def add_soc(self, rows, tag: str = ""):
        """``||rows[1:]|| <= rows[0]``."""
        self.soc.append([_as_affine(r) for r in rows])
        self._tag(tag, "soc", len(self.soc) - 1)

    def build(self, c) -> ConicProgram:
        rows = self.eq + self.nonneg + [r for blk in self.soc for r in blk]
        ri, ci, vals = [], [], []
        b = np.empty(len(rows))
        for k, f in enumerate(rows):
            ri.append(np.full(f.idx.size, k, dtype=np.intp))
            ci.append(f.idx)
            vals.append(-f.val)
            b[k] = f.const
        if rows:
            A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(ri), np.concatenate(ci))),
                              shape=(len(rows), self.n)).tocsc()
        else:
            A = sp.csc_matrix((0, self.n))
        cones = ConeLayout(len(self.eq), len(self.nonneg), tuple(len(blk) for blk in self.soc))
        soc_start = np.concatenate([[0], np.cumsum([len(blk) for blk in self.soc])]).astype(int)
        base = {"eq": 0, "nonneg": len(self.eq), "soc": len(self.eq) + len(self.nonneg)}
        self.row_map = {}
        for tag, kind, pos in self._where:
            row = base[kind] + (int(soc_start[pos]) if kind == "soc" else pos)
            self.row_map.setdefault(tag, []).append(row)
        return ConicProgram(c=np.asarray(c, float), A=A, b=b, cones=cones, var_names=self.names)


def _as_affine(v) -> Affine:
    return v if isinstance(v, Affine) else Affine.constant(float(v))
