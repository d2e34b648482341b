"""Exact linear algebra over Z and Z/m.

Finitely generated modules are stored as cokernel presentations: a
generator count ``g`` and an integer relations matrix with ``g`` rows whose
columns are the relators.  All computations over Z/m are lifted to Z by
appending ``m * e_i`` relators, so a single Smith-normal-form routine
answers every question (isomorphism invariants, kernels, images,
cokernels, solvability of linear systems).

Matrices are numpy arrays with ``dtype=object`` so every intermediate
entry is an exact Python integer; Smith reduction can blow up entries even
when inputs are tiny.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import BaseMismatch, IllFormedHom


# ---------------------------------------------------------------------------
# integer matrices


def intmat(rows, cols=None) -> np.ndarray:
    """Build an exact integer matrix from a list of rows.

    ``cols`` is required when ``rows`` is empty or has empty rows, since
    the shape cannot be inferred from the data.
    """
    if isinstance(rows, np.ndarray):
        a = rows.astype(object)
        if a.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        return a
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, 0 if cols is None else cols), dtype=object)
    width = len(rows[0])
    for r in rows:
        if len(r) != width:
            raise ValueError("ragged rows in matrix literal")
    if cols is not None and width != cols and width != 0:
        raise ValueError("explicit column count disagrees with data")
    if width == 0 and cols is not None:
        width = cols
        rows = [[]] * len(rows)
    a = np.zeros((len(rows), width), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            a[i, j] = int(v)
    return a


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=object)


def identity(n: int) -> np.ndarray:
    return np.identity(n, dtype=object)


def hstack(*mats: np.ndarray) -> np.ndarray:
    mats = [m for m in mats]
    rows = mats[0].shape[0]
    for m in mats:
        assert m.shape[0] == rows
    return np.concatenate(mats, axis=1) if mats else zeros(0, 0)


def vstack(*mats: np.ndarray) -> np.ndarray:
    cols = mats[0].shape[1]
    for m in mats:
        assert m.shape[1] == cols
    return np.concatenate(mats, axis=0)


def block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if 0 in a.shape or 0 in b.shape:
        return zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    return np.kron(a, b)


def mats_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.array_equal(a, b))


def xgcd(a: int, b: int):
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def smith_normal_form(A: np.ndarray):
    """Diagonalize ``A`` over Z with invertible transforms.

    Returns ``(U, Uinv, D, V, Vinv)`` with ``U @ A @ V = D``, the diagonal
    of ``D`` nonnegative and satisfying d1 | d2 | ... .  Pivots are chosen
    as the smallest nonzero absolute value, ties broken in row-major
    order, so the reduction is deterministic.
    """
    m, n = A.shape
    D = A.copy()
    U, Uinv = identity(m), identity(m)
    V, Vinv = identity(n), identity(n)

    def row_swap(i, j):
        D[[i, j], :] = D[[j, i], :]
        U[[i, j], :] = U[[j, i], :]
        Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def col_swap(i, j):
        D[:, [i, j]] = D[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]
        Vinv[[i, j], :] = Vinv[[j, i], :]

    def row_add(i, j, q):
        # R_i += q * R_j
        D[i, :] += q * D[j, :]
        U[i, :] += q * U[j, :]
        Uinv[:, j] -= q * Uinv[:, i]

    def col_add(i, j, q):
        # C_i += q * C_j
        D[:, i] += q * D[:, j]
        V[:, i] += q * V[:, j]
        Vinv[j, :] -= q * Vinv[i, :]

    def row_neg(i):
        D[i, :] = -D[i, :]
        U[i, :] = -U[i, :]
        Uinv[:, i] = -Uinv[:, i]

    t = 0
    while t < min(m, n):
        region = D[t:, t:]
        nzr, nzc = np.nonzero(region != 0)
        if len(nzr) == 0:
            break
        flat = [abs(region[nzr[k], nzc[k]]) for k in range(len(nzr))]
        k = min(range(len(flat)), key=flat.__getitem__)  # row-major ties
        pi, pj = t + int(nzr[k]), t + int(nzc[k])
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        if D[t, t] < 0:
            row_neg(t)
        d = D[t, t]
        dirty = False
        col = D[t + 1:, t]
        if np.any(col != 0):
            q = col // d
            D[t + 1:, :] -= np.outer(q, D[t, :])
            U[t + 1:, :] -= np.outer(q, U[t, :])
            Uinv[:, t] += Uinv[:, t + 1:] @ q
            dirty = bool(np.any(D[t + 1:, t] != 0))
        row = D[t, t + 1:]
        if np.any(row != 0):
            q = row // d
            D[:, t + 1:] -= np.outer(D[:, t], q)
            V[:, t + 1:] -= np.outer(V[:, t], q)
            Vinv[t, :] += q @ Vinv[t + 1:, :]
            dirty = dirty or bool(np.any(D[t, t + 1:] != 0))
        if dirty:
            continue
        rem = D[t + 1:, t + 1:] % d
        bad_rows, _ = np.nonzero(rem != 0)
        if len(bad_rows) > 0:
            row_add(t, t + 1 + int(bad_rows[0]), 1)
            continue
        t += 1
    return U, Uinv, D, V, Vinv


def column_hnf(A: np.ndarray) -> np.ndarray:
    """Canonical column-Hermite basis of the column lattice of ``A``.

    Zero columns are dropped; pivots are positive and entries to the left
    of a pivot are reduced into ``[0, pivot)``.  The output is unique for
    the lattice, which keeps downstream presentations deterministic.
    """
    m, n = A.shape
    cols = [A[:, j].copy() for j in range(n) if any(v != 0 for v in A[:, j])]
    piv = 0
    for row in range(m):
        idxs = [j for j in range(piv, len(cols)) if cols[j][row] != 0]
        if not idxs:
            continue
        j0 = idxs[0]
        for j in idxs[1:]:
            a, b = cols[j0][row], cols[j][row]
            g, x, y = xgcd(a, b)
            c0, cj = cols[j0], cols[j]
            cols[j0] = x * c0 + y * cj
            cols[j] = (-(b // g)) * c0 + (a // g) * cj
        cols[piv], cols[j0] = cols[j0], cols[piv]
        if cols[piv][row] < 0:
            cols[piv] = -cols[piv]
        d = cols[piv][row]
        for k in range(piv):
            q = cols[k][row] // d
            if q:
                cols[k] = cols[k] - q * cols[piv]
        piv += 1
    if piv == 0:
        return zeros(m, 0)
    out = zeros(m, piv)
    for j in range(piv):
        out[:, j] = cols[j]
    return out


def kernel_basis(A: np.ndarray) -> np.ndarray:
    """Basis (as columns) of the integer kernel lattice of ``A``."""
    _, _, D, V, _ = smith_normal_form(A)
    r = sum(1 for i in range(min(A.shape)) if D[i, i] != 0)
    return V[:, r:].copy()


class Lattice:
    """Column lattice of an integer matrix, with cached Smith data.

    Supports membership tests with witnesses, which is how every
    well-definedness check and induced-map computation is phrased.
    """

    def __init__(self, mat: np.ndarray):
        self.mat = mat
        self.ambient = mat.shape[0]

    @cached_property
    def _snf(self):
        return smith_normal_form(self.mat)

    @cached_property
    def _rank(self):
        D = self._snf[2]
        return sum(1 for i in range(min(D.shape)) if D[i, i] != 0)

    def _solve_block(self, M: np.ndarray) -> Optional[np.ndarray]:
        # batched: one U @ M product, then divisibility checks per entry
        U, _, D, V, _ = self._snf
        W = U @ M
        r = self._rank
        n = self.mat.shape[1]
        Y = zeros(n, M.shape[1])
        for i in range(W.shape[0]):
            if i < r:
                d = D[i, i]
                for j in range(M.shape[1]):
                    w = W[i, j]
                    if w % d != 0:
                        return None
                    Y[i, j] = w // d
            else:
                for j in range(M.shape[1]):
                    if W[i, j] != 0:
                        return None
        return V @ Y

    def express(self, v: np.ndarray) -> Optional[np.ndarray]:
        """Coefficients c with ``mat @ c = v``, or None if v is outside."""
        sol = self._solve_block(v.reshape(-1, 1))
        return None if sol is None else sol[:, 0]

    def contains(self, v: np.ndarray) -> bool:
        return self.express(v) is not None

    def contains_matrix(self, M: np.ndarray) -> bool:
        if M.shape[1] == 0:
            return True
        return self._solve_block(M) is not None

    def express_matrix(self, M: np.ndarray) -> Optional[np.ndarray]:
        if M.shape[1] == 0:
            return zeros(self.mat.shape[1], 0)
        return self._solve_block(M)


def preimage_lattice(F: np.ndarray, T: np.ndarray) -> np.ndarray:
    """HNF basis of the lattice {x : F @ x lies in the column span of T}."""
    stacked = hstack(F, T)
    kb = kernel_basis(stacked)
    return column_hnf(kb[: F.shape[1], :])


def solve_through(B: np.ndarray, C: np.ndarray, rels: np.ndarray) -> np.ndarray:
    """Solve B @ X = C modulo the column lattice of ``rels``.

    Raises IllFormedHom when some column of C is not reachable; used to
    induce maps on kernels and to corestrict along inclusions.
    """
    lat = Lattice(hstack(B, rels))
    sol = lat.express_matrix(C)
    if sol is None:
        raise IllFormedHom("linear system has no solution modulo relations")
    return sol[: B.shape[1], :]


# ---------------------------------------------------------------------------
# base rings and modules


class RingKind(Enum):
    INTEGERS = "Z"
    INTEGERS_MOD = "Zmod"


@dataclass(frozen=True)
class BaseRing:
    """Z or Z/m; every module in the engine lives over one of these."""

    kind: RingKind
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.kind is RingKind.INTEGERS_MOD:
            if self.modulus is None or self.modulus < 2:
                raise ValueError("modulus must be an integer >= 2")
        elif self.modulus is not None:
            raise ValueError("Z carries no modulus")

    @staticmethod
    def Z() -> "BaseRing":
        return BaseRing(RingKind.INTEGERS)

    @staticmethod
    def Zmod(m: int) -> "BaseRing":
        return BaseRing(RingKind.INTEGERS_MOD, m)

    @property
    def is_modular(self) -> bool:
        return self.kind is RingKind.INTEGERS_MOD

    def two_invertible(self) -> bool:
        return self.is_modular and self.modulus % 2 == 1

    def characteristic(self) -> int:
        return self.modulus if self.is_modular else 0

    def reduce(self, M: np.ndarray) -> np.ndarray:
        if self.is_modular:
            return M % self.modulus
        return M

    def label(self) -> str:
        return "Z" if not self.is_modular else f"Z/{self.modulus}"


class SubquotientKind(Enum):
    KERNEL = "Kernel"
    IMAGE = "Image"
    COKERNEL = "Cokernel"


class CombineKind(Enum):
    DIRECT_SUM = "DirectSum"
    TENSOR = "Tensor"


class FgModule:
    """Finitely generated module over Z or Z/m, as a cokernel presentation.

    ``rels`` has exactly ``gens`` rows; its columns are the relators.  The
    module is Z^gens (or (Z/m)^gens) modulo the column span.
    """

    def __init__(self, base: BaseRing, gens: int, rels):
        self.base = base
        self.gens = int(gens)
        mat = intmat(rels, cols=None)
        if mat.shape == (0, 0) and self.gens > 0:
            mat = zeros(self.gens, 0)
        if mat.shape[0] != self.gens:
            raise ValueError(
                f"relations need {self.gens} rows, got {mat.shape[0]}")
        self.rels = base.reduce(mat)

    # -- helpers ---------------------------------------------------------

    @staticmethod
    def free(base: BaseRing, rank: int) -> "FgModule":
        return FgModule(base, rank, zeros(rank, 0))

    @staticmethod
    def zero(base: BaseRing) -> "FgModule":
        return FgModule(base, 0, zeros(0, 0))

    @staticmethod
    def cyclic(base: BaseRing, n: int) -> "FgModule":
        """Z/n over the given base (n = 0 encodes a free rank-1 module)."""
        if n == 0:
            return FgModule.free(base, 1)
        return FgModule(base, 1, [[n]])

    def lifted_rels(self) -> np.ndarray:
        """Relations over Z, with m*e_i relators appended over Z/m."""
        if self.base.is_modular:
            return hstack(self.rels, self.base.modulus * identity(self.gens))
        return self.rels

    @cached_property
    def rel_lattice(self) -> Lattice:
        return Lattice(self.lifted_rels())

    @cached_property
    def _diagonalized(self):
        # (invariants incl. 0s, kept indices, U, Uinv) for the lifted rels
        U, Uinv, D, _, _ = smith_normal_form(self.lifted_rels())
        diag = [D[i, i] for i in range(min(D.shape))]
        invs = []
        for i in range(self.gens):
            d = diag[i] if i < len(diag) else 0
            invs.append(int(d))
        kept = [i for i, d in enumerate(invs) if d != 1]
        return invs, kept, U, Uinv

    def invariant_factors(self) -> tuple:
        """Complete isomorphism invariant: d1 | d2 | ..., 0 for free parts."""
        invs, kept, _, _ = self._diagonalized
        return tuple(invs[i] for i in kept)

    def is_zero(self) -> bool:
        return len(self.invariant_factors()) == 0

    def is_finite(self) -> bool:
        return all(d != 0 for d in self.invariant_factors())

    def order(self) -> Optional[int]:
        """Number of elements, or None when infinite."""
        out = 1
        for d in self.invariant_factors():
            if d == 0:
                return None
            out *= d
        return out

    def canonical(self):
        """SNF-canonical copy plus the mutually inverse transition homs.

        Returns ``(canon, to_canon, from_canon)``.  The canonical module
        has one generator per nontrivial invariant factor, with a diagonal
        relator for each finite one.
        """
        invs, kept, U, Uinv = self._diagonalized
        cols = []
        for new_j, i in enumerate(kept):
            d = invs[i]
            if d != 0 and not (self.base.is_modular and d == self.base.modulus):
                col = [0] * len(kept)
                col[new_j] = d
                cols.append(col)
        rels = intmat(list(map(list, zip(*cols))), cols=len(cols)) \
            if cols else zeros(len(kept), 0)
        canon = FgModule(self.base, len(kept), rels)
        to_mat = zeros(len(kept), self.gens)
        for new_i, i in enumerate(kept):
            to_mat[new_i, :] = U[i, :]
        from_mat = zeros(self.gens, len(kept))
        for new_j, i in enumerate(kept):
            from_mat[:, new_j] = Uinv[:, i]
        to = ModuleHom(self, canon, to_mat)
        frm = ModuleHom(canon, self, from_mat)
        return canon, to, frm

    def __eq__(self, other):
        return (isinstance(other, FgModule) and self.base == other.base
                and self.gens == other.gens and mats_equal(self.rels, other.rels))

    def __repr__(self):
        return (f"FgModule({self.base.label()}, gens={self.gens}, "
                f"inv={self.invariant_factors()})")


class ModuleHom:
    """Map of presentations: ``matrix`` is target-generators x source-generators."""

    def __init__(self, source: FgModule, target: FgModule, matrix):
        if source.base != target.base:
            raise BaseMismatch("hom endpoints live over different base rings")
        self.source = source
        self.target = target
        mat = intmat(matrix, cols=source.gens)
        if mat.shape != (target.gens, source.gens):
            raise ValueError(
                f"hom matrix must be {target.gens}x{source.gens}, "
                f"got {mat.shape[0]}x{mat.shape[1]}")
        self.matrix = source.base.reduce(mat)

    @staticmethod
    def identity(m: FgModule) -> "ModuleHom":
        return ModuleHom(m, m, identity(m.gens))

    @staticmethod
    def zero(source: FgModule, target: FgModule) -> "ModuleHom":
        return ModuleHom(source, target, zeros(target.gens, source.gens))

    def well_defined(self) -> bool:
        """True when the matrix carries source relations into target relations.

        Only stored relators need checking: over Z/m the implicit m*e_i
        relators land in m*Z^t, which the target lattice always contains.
        """
        if self.source.rels.shape[1] == 0:
            return True
        image_of_rels = self.matrix @ self.source.rels
        return self.target.rel_lattice.contains_matrix(image_of_rels)

    def require_well_defined(self) -> "ModuleHom":
        if not self.well_defined():
            raise IllFormedHom("matrix does not respect the relations")
        return self

    def compose(self, other: "ModuleHom") -> "ModuleHom":
        """self o other."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition endpoints do not match")
        return ModuleHom(other.source, self.target, self.matrix @ other.matrix)

    def add(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.matrix + other.matrix)

    def sub(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.matrix - other.matrix)

    def scale(self, c: int) -> "ModuleHom":
        return ModuleHom(self.source, self.target, c * self.matrix)

    def equal_to(self, other: "ModuleHom") -> bool:
        """Equality as maps, i.e. the difference lands in target relations."""
        if self.source.gens != other.source.gens or self.target.gens != other.target.gens:
            return False
        diff = self.matrix - other.matrix
        if not diff.any():  # exact agreement, no lattice solve needed
            return True
        return self.target.rel_lattice.contains_matrix(diff)

    def is_zero_map(self) -> bool:
        if not self.matrix.any():
            return True
        return self.target.rel_lattice.contains_matrix(self.matrix)

    def __repr__(self):
        return f"ModuleHom({self.source!r} -> {self.target!r})"


# ---------------------------------------------------------------------------
# operations


def subquotient(f: ModuleHom, which: SubquotientKind):
    """Kernel, image or cokernel of ``f`` with its canonical structure map.

    Returns ``(module, hom)`` where the hom points into the source
    (Kernel), into the target (Image), or out of the target (Cokernel).
    Satisfies Image = source/Kernel on the nose: both are presented on the
    source generators by the same preimage lattice.
    """
    f.require_well_defined()
    base = f.source.base
    if which is SubquotientKind.COKERNEL:
        coker = FgModule(base, f.target.gens,
                         hstack(f.target.rels, base.reduce(f.matrix)))
        return coker, ModuleHom(f.target, coker, identity(f.target.gens))

    pre = preimage_lattice(f.matrix, f.target.lifted_rels())
    if which is SubquotientKind.IMAGE:
        image = FgModule(base, f.source.gens, pre)
        return image, ModuleHom(image, f.target, f.matrix)
    if which is SubquotientKind.KERNEL:
        krels = preimage_lattice(pre, f.source.lifted_rels())
        kernel = FgModule(base, pre.shape[1], krels)
        return kernel, ModuleHom(kernel, f.source, pre)
    raise ValueError(f"unknown subquotient kind {which}")


def combine(a: FgModule, b: FgModule, which: CombineKind) -> FgModule:
    """Direct sum or tensor product of presentations over a common base."""
    if a.base != b.base:
        raise BaseMismatch(f"{a.base.label()} vs {b.base.label()}")
    if which is CombineKind.DIRECT_SUM:
        return FgModule(a.base, a.gens + b.gens, block_diag(a.rels, b.rels))
    if which is CombineKind.TENSOR:
        rels = hstack(kron(a.rels, identity(b.gens)),
                      kron(identity(a.gens), b.rels))
        return FgModule(a.base, a.gens * b.gens, rels)
    raise ValueError(f"unknown combination kind {which}")


def direct_sum_hom(f: ModuleHom, g: ModuleHom) -> ModuleHom:
    return ModuleHom(
        combine(f.source, g.source, CombineKind.DIRECT_SUM),
        combine(f.target, g.target, CombineKind.DIRECT_SUM),
        block_diag(f.matrix, g.matrix))


def tensor_hom(f: ModuleHom, g: ModuleHom) -> ModuleHom:
    return ModuleHom(
        combine(f.source, g.source, CombineKind.TENSOR),
        combine(f.target, g.target, CombineKind.TENSOR),
        kron(f.matrix, g.matrix))
