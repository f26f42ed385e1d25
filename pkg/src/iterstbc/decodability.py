"""Real-symbol basis matrices, pairwise orthogonality quantities and group decodability."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .codebook import CodeSpec, encode
from .cyclotomic import CycloElement
from .linalg import Matrix, conj_transpose, is_zero_matrix, mat_add, mat_mul


@dataclass(frozen=True)
class BasisMatrix:
    """Codeword of a single real symbol: multiplier 1 (part 0) or g (part 1) at complex position ``position``."""

    index: int
    position: int
    part: int
    matrix: Matrix


def basis_matrices(spec: CodeSpec, subcode: str = "all") -> list[BasisMatrix]:
    """One exact matrix per real information symbol; ``diagonal`` keeps the first D-layer only."""
    if subcode == "all":
        positions = range(spec.symbol_count)
    elif subcode in ("diagonal", "diagonal-block"):
        positions = range(spec.symbols_per_layer)
    else:
        raise ValueError(f"unknown subcode {subcode!r} (all or diagonal)")
    out = []
    for p in positions:
        for part, sym in enumerate(((1, 0), (0, 1))):
            vec = [(0, 0)] * spec.symbol_count
            vec[p] = sym
            out.append(BasisMatrix(len(out), p, part, encode(vec, spec, check=False).exact_matrix))
    return out


def _frobenius2(mat: Matrix) -> CycloElement:
    acc = mat[0][0].field.zero
    for row in mat:
        for z in row:
            if not z.is_zero():
                acc = acc + z * z.conj()
    return acc


def mgk(g: BasisMatrix | Matrix, k: BasisMatrix | Matrix) -> CycloElement:
    """||B_g B_k^* + B_k B_g^*||_F^2, exact.  Totally real, and rational only in special cases."""
    a = g.matrix if isinstance(g, BasisMatrix) else g
    b = k.matrix if isinstance(k, BasisMatrix) else k
    if len(a) != len(b) or len(a[0]) != len(b[0]):
        raise ValueError("basis matrices differ in shape")
    s = mat_add(mat_mul(a, conj_transpose(b)), mat_mul(b, conj_transpose(a)))
    if is_zero_matrix(s):
        return a[0][0].field.zero
    return _frobenius2(s)


def mgk_is_zero(g: BasisMatrix | Matrix, k: BasisMatrix | Matrix) -> bool:
    a = g.matrix if isinstance(g, BasisMatrix) else g
    b = k.matrix if isinstance(k, BasisMatrix) else k
    return is_zero_matrix(mat_add(mat_mul(a, conj_transpose(b)), mat_mul(b, conj_transpose(a))))


@dataclass
class GroupPartition:
    groups: list[list[int]]
    edges: list[tuple[int, int]]

    @property
    def count(self) -> int:
        return len(self.groups)

    def group_of(self) -> dict[int, int]:
        return {i: gi for gi, grp in enumerate(self.groups) for i in grp}


def find_partition(matrices: Sequence[BasisMatrix]) -> GroupPartition:
    """Finest partition with M_{g,k} = 0 across groups: components of the nonzero-M graph."""
    if not matrices:
        raise ValueError("need at least one basis matrix")
    size = len(matrices)
    parent = list(range(size))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = []
    for i in range(size):
        for j in range(i + 1, size):
            if not mgk_is_zero(matrices[i], matrices[j]):
                edges.append((i, j))
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    comps: dict[int, list[int]] = {}
    for i in range(size):
        comps.setdefault(find(i), []).append(matrices[i].index)
    return GroupPartition(sorted(comps.values()), edges)


def validate_partition(matrices: Sequence[BasisMatrix], partition: GroupPartition) -> bool:
    """Every index covered once and every cross-group M_{g,k} exactly zero."""
    by_index = {b.index: b for b in matrices}
    covered = sorted(i for grp in partition.groups for i in grp)
    if covered != sorted(by_index):
        return False
    owner = partition.group_of()
    for a in by_index:
        for b in by_index:
            if a < b and owner[a] != owner[b] and not mgk_is_zero(by_index[a], by_index[b]):
                return False
    return True


def complexity_exponent(spec: CodeSpec, partition: GroupPartition, matrices: Sequence[BasisMatrix] | None = None) -> Fraction:
    """Exponent mn^2 - mn(l-1)/l of M in the ML-decoding complexity, counted in complex symbols.

    ``partition`` must be valid for the diagonal-block subcode; pass its matrices to have that checked.
    """
    if matrices is not None and not validate_partition(matrices, partition):
        raise ValueError("partition is not valid for the given basis matrices")
    l = partition.count
    if l < 1:
        raise ValueError("empty partition")
    mn = spec.m * spec.n
    return Fraction(mn * spec.n) - Fraction(mn * (l - 1), l)


def closed_form_exponent(n: int, kind: str) -> Fraction:
    """2n^2 - 3n/2 for QAM (four groups) and 2n^2 - n for HEX (two groups), m = 2."""
    if kind == "QAM":
        return Fraction(2 * n * n) - Fraction(3 * n, 2)
    if kind == "HEX":
        return Fraction(2 * n * n - n)
    raise ValueError(kind)
