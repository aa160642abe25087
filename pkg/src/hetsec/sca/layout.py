"""Index map of the real decision vector of the SCA subproblem."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SubproblemLayout:
    m: int
    k: int
    n_m: int
    n_f: int
    q: int = 6
    with_an: bool = True
    slots: dict = field(init=False, repr=False)
    n: int = field(init=False)

    def __post_init__(self):
        sizes = [("w_m", self.m * 2 * self.n_m), ("w_i", 2 * self.n_f)]
        if self.with_an:
            sizes.append(("v_e", 2 * self.n_f))
        sizes += [("gamma", 1), ("gamma_i", 1), ("gamma_e", 1), ("s_i", 1), ("s_m", self.m)]
        if self.with_an:
            sizes.append(("s_e", 1))
        sizes += [("mu_i", 1), ("eta_i", 1), ("t_k", self.k), ("t_k0", self.k * self.m)]
        if self.with_an:
            sizes.append(("t_e", self.k))
        sizes += [("c", 1), ("tau", self.q + 4)]
        self.slots = {}
        off = 0
        for name, size in sizes:
            self.slots[name] = (off, size)
            off += size
        self.n = off

    def start(self, name: str) -> int:
        return self.slots[name][0]

    def index(self, name: str, i: int = 0) -> int:
        off, size = self.slots[name]
        if not 0 <= i < size:
            raise IndexError(f"{name}[{i}] out of range ({size})")
        return off + i

    def w_m_start(self, m: int) -> int:
        return self.start("w_m") + 2 * self.n_m * m

    def t_k0_index(self, k: int, m: int) -> int:
        return self.index("t_k0", k * self.m + m)

    def names(self) -> list[str]:
        out = []
        for name, (off, size) in self.slots.items():
            out += [name] if size == 1 else [f"{name}[{i}]" for i in range(size)]
        return out

    def predicted_cones(self) -> tuple[int, int, list[int]]:
        """Closed-form ``(zero, nonneg, soc dims)`` of the assembled subproblem."""
        M, K, a = self.m, self.k, int(self.with_an)
        zero = M + (1 if K == 0 else 0)
        nonneg = 1 + 1 + K * M + a * K + K + 1 + 2
        soc = [1 + 2 * M * self.n_m + 2 * self.n_f * (1 + a)]
        soc += [3] * M + [3] * a
        soc += [3, M + a + 3]
        soc += [3] * K + [3] * K
        soc += [2 * M + 2 + 2 * a] * M
        soc += [3] * (self.q + 3)
        return zero, nonneg, soc

    def describe(self) -> str:
        """Human-readable variable map (one slot per line)."""
        lines = [f"# SCA subproblem layout: n={self.n} M={self.m} K={self.k} "
                 f"N_M={self.n_m} N_F={self.n_f} q={self.q} with_an={self.with_an}"]
        for name, (off, size) in self.slots.items():
            lines.append(f"{name:8s} {off:5d} .. {off + size - 1:5d}  ({size})")
        z, l, s = self.predicted_cones()
        lines.append(f"# rows: zero={z} nonneg={l} soc={len(s)} blocks, {sum(s)} rows")
        return "\n".join(lines)
