"""Tiny GF(2) linear algebra on rows stored as Python ints (bit j = column j)."""


def rank(rows) -> int:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def kernel(rows, ncols: int) -> list[int]:
    """Basis of {x : row . x = 0 for every row}, as bit vectors."""
    rows = list(rows)
    pivots: dict[int, int] = {}
    reduced: list[int] = []
    for r in rows:
        for col, pr in pivots.items():
            if r >> col & 1:
                r ^= pr
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for i, other in enumerate(reduced):
            if other >> col & 1:
                reduced[i] = other ^ r
        for c2 in list(pivots):
            if pivots[c2] >> col & 1:
                pivots[c2] ^= r
        pivots[col] = r
        reduced.append(r)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        x = 1 << f
        for col, pr in pivots.items():
            if pr >> f & 1:
                x |= 1 << col
        out.append(x)
    return out


def det(rows, n: int) -> int:
    return 1 if rank(rows) == n else 0


def from_matrix(mat) -> list[int]:
    return [sum((int(v) & 1) << j for j, v in enumerate(row)) for row in mat]
