"""Conic program container and a plain-text triplet dump format.

Standard form::

    minimize    c' x
    subject to  A x + s = b,   s in K

where ``K`` is the product of a zero cone (equalities), a nonnegative
orthant and a list of second-order cones, laid out in that order.

Dump format (one item per line, ``#`` starts a comment)::

    conic-program v1
    n <num variables> m <num rows> nnz <num triplets>
    cones zero <z> nonneg <l> soc <q1> <q2> ...
    c <c_0> ... <c_{n-1}>
    b <b_0> ... <b_{m-1}>
    <row> <col> <value>        # nnz lines, COO triplets, 0-based
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class ConeLayout:
    zero: int = 0
    nonneg: int = 0
    soc: tuple[int, ...] = ()

    def __post_init__(self):
        if self.zero < 0 or self.nonneg < 0:
            raise ValueError("cone sizes must be nonnegative")
        if any(int(q) < 1 for q in self.soc):
            raise ValueError("second-order cone dimensions must be >= 1")
        object.__setattr__(self, "soc", tuple(int(q) for q in self.soc))

    @property
    def dim(self) -> int:
        return self.zero + self.nonneg + sum(self.soc)

    @property
    def degree(self) -> int:
        """Barrier degree of the non-zero part."""
        return self.nonneg + len(self.soc)


@dataclass
class ConicProgram:
    c: np.ndarray
    A: sp.csc_matrix
    b: np.ndarray
    cones: ConeLayout
    var_names: list[str] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.b = np.asarray(self.b, dtype=float).ravel()
        A = sp.csc_matrix(self.A, dtype=float)
        A.sum_duplicates()
        A.eliminate_zeros()
        self.A = A
        m, n = A.shape
        if self.c.size != n:
            raise ValueError(f"objective has length {self.c.size}, expected {n}")
        if self.b.size != m:
            raise ValueError(f"rhs has length {self.b.size}, expected {m}")
        if self.cones.dim != m:
            raise ValueError(f"cone layout covers {self.cones.dim} rows, matrix has {m}")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.b))
                and np.all(np.isfinite(A.data))):
            raise ValueError("program data contains NaN or Inf")

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]


def dump_program(prog: ConicProgram, path) -> None:
    coo = prog.A.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        "conic-program v1",
        f"n {prog.n} m {prog.m} nnz {coo.nnz}",
        "cones zero {} nonneg {} soc {}".format(
            prog.cones.zero, prog.cones.nonneg, " ".join(map(str, prog.cones.soc))).rstrip(),
        "c " + " ".join(repr(float(v)) for v in prog.c),
        "b " + " ".join(repr(float(v)) for v in prog.b),
    ]
    for k in order:
        lines.append(f"{coo.row[k]} {coo.col[k]} {float(coo.data[k])!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_program(path) -> ConicProgram:
    with open(path) as fh:
        rows = [ln.split("#", 1)[0].strip() for ln in fh]
    rows = [r for r in rows if r]
    if not rows or rows[0] != "conic-program v1":
        raise ValueError("not a conic-program v1 file")
    head = rows[1].split()
    n, m, nnz = int(head[1]), int(head[3]), int(head[5])
    ct = rows[2].split()
    zero, nonneg = int(ct[2]), int(ct[4])
    soc = tuple(int(v) for v in ct[6:])
    c = np.array([float(v) for v in rows[3].split()[1:]])
    b = np.array([float(v) for v in rows[4].split()[1:]])
    trip = rows[5:5 + nnz]
    if len(trip) != nnz:
        raise ValueError("truncated triplet section")
    if nnz:
        data = np.array([t.split() for t in trip], dtype=float)
        A = sp.coo_matrix((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))),
                          shape=(m, n))
    else:
        A = sp.coo_matrix((m, n))
    return ConicProgram(c=c, A=A.tocsc(), b=b, cones=ConeLayout(zero, nonneg, soc))
