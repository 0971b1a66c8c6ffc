"""Shift-polynomial conjugation and trace-condition machinery.

A shift polynomial is an upper-triangular Toeplitz matrix ``I + sum c_i N^i``
where ``N`` is the superdiagonal shift; these form a group commuting with
the shift, and conjugating by them clears prescribed first-column entries
without touching hook-protected positions.  The trace conditions — every
power-times-element trace vanishes on a span of nilpotent matrices over a
large enough field — double as verifiers and as linear pruning constraints
for the search engine.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    FieldTooSmallError,
    NotNilpotentError,
    PreconditionUnmetError,
)
from .fields import FieldSpec, PrimeField, RawScalar
from .matrices import ExactMatrix, is_nilpotent
from .spaces import (
    DEFAULT_BUDGET,
    DEFAULT_SAMPLES,
    PROVED,
    REFUTED,
    SAMPLED_PASS,
    VerificationOutcome,
    _iter_members,
)


@dataclass(frozen=True, slots=True)
class ShiftPolynomial:
    """Coefficients c_1..c_{n-1} of the unit upper-triangular Toeplitz
    matrix I + sum_i c_i * shift^i (always invertible)."""

    field: FieldSpec
    n: int
    coefficients: tuple[RawScalar, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.coefficients) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} coefficients")
        ok = self.field.is_canonical
        if not all(ok(c) for c in self.coefficients):
            raise ValueError("coefficients must be canonical; use ShiftPolynomial.of")

    @classmethod
    def of(cls, field: FieldSpec, n: int, coefficients: Sequence) -> "ShiftPolynomial":
        norm = field.normalize
        return cls(field, n, tuple(norm(c) for c in coefficients))


def shift_poly_matrix(sp: ShiftPolynomial) -> ExactMatrix:
    """The explicit matrix: unit diagonal, c_k on the k-th superdiagonal."""
    field = sp.field
    one, zero = field.one, field.zero
    n = sp.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if j == i:
                row.append(one)
            elif j > i:
                row.append(sp.coefficients[j - i - 1])
            else:
                row.append(zero)
        rows.append(tuple(row))
    return ExactMatrix(field, tuple(rows))


def _poly_mul_trunc(a, b, n, field):
    out = [field.zero] * n
    add, mul = field.add, field.mul
    for i, x in enumerate(a):
        if x == field.zero:
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            out[i + j] = add(out[i + j], mul(x, y))
    return out


def shift_poly_inverse(sp: ShiftPolynomial) -> ShiftPolynomial:
    """Inverse in the shift-polynomial group via the alternating power series
    I - N + N^2 - ... of the nilpotent part N."""
    field = sp.field
    n = sp.n
    neg_n_part = [field.zero] + [field.neg(c) for c in sp.coefficients]
    acc = [field.one] + [field.zero] * (n - 1)
    term = acc[:]
    for _ in range(1, n):
        term = _poly_mul_trunc(term, neg_n_part, n, field)
        acc = [field.add(x, y) for x, y in zip(acc, term)]
    return ShiftPolynomial(field, n, tuple(acc[1:]))


def conjugate_by_shift(a: ExactMatrix, sp: ShiftPolynomial, side: str) -> ExactMatrix:
    """Exact conjugation by the shift polynomial.

    ``side`` selects the orientation: ``"C_inv_A_C"`` computes C^-1 A C and
    ``"C_A_C_inv"`` computes C A C^-1.
    """
    if side not in ("C_inv_A_C", "C_A_C_inv"):
        raise ValueError(f"unknown side {side!r}")
    if not a.is_square or a.n_rows != sp.n:
        raise ValueError(f"expected a {sp.n}x{sp.n} matrix")
    c = shift_poly_matrix(sp)
    c_inv = shift_poly_matrix(shift_poly_inverse(sp))
    if side == "C_inv_A_C":
        return c_inv @ a @ c
    return c @ a @ c_inv


def clear_first_column(a: ExactMatrix, pivot_row: int) -> tuple[ShiftPolynomial, ExactMatrix]:
    """Conjugate so the first column keeps only its lowest nonzero entry.

    Requires (0-based) ``a[pivot_row][0] != 0``, ``pivot_row >= 1`` and zeros
    below it in column 0.  Returns the shift polynomial and B = C A C^-1 with
    B[i][0] = 0 for i != pivot_row and B[pivot_row][0] = a[pivot_row][0].

    The coefficients satisfy the triangular recurrence
    (C A C^-1)[i][0] = a[i][0] + sum_k c_k * a[i+k][0], solved upward from
    the row just above the pivot.
    """
    if not a.is_square:
        raise ValueError("expected a square matrix")
    n = a.n_rows
    field = a.field
    zero = field.zero
    if not 1 <= pivot_row <= n - 1:
        raise PreconditionUnmetError(f"pivot row must lie in [1, {n - 1}]")
    col = [a.rows[i][0] for i in range(n)]
    if col[pivot_row] == zero:
        raise PreconditionUnmetError("pivot entry of the first column is zero")
    if any(col[i] != zero for i in range(pivot_row + 1, n)):
        raise PreconditionUnmetError("entries below the pivot row must be zero")
    coeffs = [zero] * (n - 1)
    inv_pivot = field.inv(col[pivot_row])
    for s in range(1, pivot_row + 1):
        i = pivot_row - s
        val = col[i]
        for k in range(1, s):
            val = field.add(val, field.mul(coeffs[k - 1], col[i + k]))
        coeffs[s - 1] = field.neg(field.mul(val, inv_pivot))
    sp = ShiftPolynomial(field, n, tuple(coeffs))
    return sp, conjugate_by_shift(a, sp, "C_A_C_inv")


# ---------------------------------------------------------------------------
# trace conditions

@dataclass(frozen=True, slots=True)
class TraceWitness:
    """A span point, basis element and power with a nonzero trace."""

    coefficients: tuple[RawScalar, ...]
    basis_index: int
    basis_matrix: ExactMatrix
    power: int
    value: RawScalar


def _trace_product(power_rows, nz_entries, field):
    # tr(P @ B) = sum over nonzero B[b][a] of P[a][b] * B[b][a]
    acc = field.zero
    add, mul = field.add, field.mul
    for b, a, v in nz_entries:
        acc = add(acc, mul(power_rows[a][b], v))
    return acc


def _validate_span_basis(span_basis, field):
    if not span_basis:
        raise ValueError("span basis must be nonempty")
    n = span_basis[0].n_rows
    for m in span_basis:
        if not m.is_square or m.n_rows != n:
            raise ValueError("span basis matrices must be square of equal size")
        if field is not None and m.field != field:
            raise ValueError("span basis matrices must share the given field")
        if m.field != span_basis[0].field:
            raise ValueError("span basis matrices must share one field")
    return span_basis[0].field, n


def trace_condition_verify(
    span_basis: Sequence[ExactMatrix],
    m_max: int,
    field: Optional[FieldSpec] = None,
    *,
    budget: int = DEFAULT_BUDGET,
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> VerificationOutcome:
    """Verify tr(A^m B) = 0 for every A in the span, every basis element B,
    and every 1 <= m <= m_max.

    For fixed m the trace is a polynomial of degree <= m in each span
    coefficient, so evaluating on the grid {0..m_max}^d proves the identity;
    the field must therefore have more than m_max elements.  A refutation
    reports the span point, basis element, power and trace value.
    """
    field, n = _validate_span_basis(list(span_basis), field)
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if isinstance(field, PrimeField) and m_max >= field.p:
        raise FieldTooSmallError(
            f"trace conditions need |K| > m_max: |K| = {field.p}, m_max = {m_max}"
        )
    d = len(span_basis)
    basis_rows = [m.rows for m in span_basis]
    nz = [
        [(b, a, rows[b][a]) for b in range(n) for a in range(n) if rows[b][a]]
        for rows in basis_rows
    ]
    if isinstance(field, PrimeField):
        values = list(range(m_max + 1))
    else:
        values = [Fraction(i) for i in range(m_max + 1)]
    total = (m_max + 1) ** d

    def check_point(t, rows):
        """Return a TraceWitness for the first failing (m, B) or None."""
        power = rows
        for m in range(1, m_max + 1):
            if m > 1:
                power = _matmul(power, rows, field)
            for b_idx, entries in enumerate(nz):
                val = _trace_product(power, entries, field)
                if val != field.zero:
                    return TraceWitness(tuple(t), b_idx, span_basis[b_idx], m, val)
        return None

    zero_rows = tuple((field.zero,) * n for _ in range(n))

    if total > budget:
        if sample_count <= 0:
            raise BudgetExceededError(f"{total} grid points exceed budget {budget}")
        rng = random.Random(seed)
        checked = 0
        for _ in range(sample_count):
            if isinstance(field, PrimeField):
                t = tuple(rng.randrange(field.p) for _ in range(d))
            else:
                t = tuple(Fraction(rng.randint(-10**6, 10**6)) for _ in range(d))
            rows = _combine(zero_rows, basis_rows, t, field)
            checked += 1
            witness = check_point(t, rows)
            if witness is not None:
                return VerificationOutcome(
                    status=REFUTED, method="random", checks_performed=checked,
                    witness=witness, sample_count=sample_count, seed=seed,
                    notes=(f"grid of {total} points exceeded budget {budget}",),
                )
        return VerificationOutcome(
            status=SAMPLED_PASS, method="random", checks_performed=checked,
            sample_count=sample_count, seed=seed,
            notes=(f"grid of {total} points exceeded budget {budget}",),
        )

    use_numpy = (
        isinstance(field, PrimeField)
        and total >= 4096
        and n * (field.p - 1) ** 2 < 2**62
    )
    if use_numpy:
        witness, checked = _trace_scan_numpy(
            span_basis, basis_rows, values, m_max, field.p, n
        )
    else:
        witness, checked = None, 0
        for t, rows in _iter_members(zero_rows, basis_rows, values, field):
            checked += 1
            witness = check_point(t, rows)
            if witness is not None:
                break
    if witness is not None:
        return VerificationOutcome(
            status=REFUTED, method="grid", checks_performed=checked, witness=witness,
        )
    return VerificationOutcome(status=PROVED, method="grid", checks_performed=checked)


def _matmul(a, b, field):
    if isinstance(field, PrimeField):
        from .matrices import _matmul_mod_p

        return _matmul_mod_p(a, b, field.p)
    from .matrices import _matmul_frac

    return _matmul_frac(a, b)


def _combine(base_rows, dir_rows_list, coeffs, field):
    from .spaces import _combine_rows

    return _combine_rows(base_rows, dir_rows_list, list(coeffs), field)


def _trace_scan_numpy(span_basis, basis_rows, values, m_max, p, n):
    """Vectorized grid scan; picks the violation that the pure scan order
    (point-major, then power, then basis element) would find first."""
    d = len(basis_rows)
    basis_flat = np.array(
        [[x for row in rows for x in row] for rows in basis_rows], dtype=np.int64
    )
    basis_arr = [np.array(rows, dtype=np.int64) for rows in basis_rows]
    chunk_size = 1 << 17
    point_iter = itertools.product(values, repeat=d)
    checked = 0
    while True:
        chunk = list(itertools.islice(point_iter, chunk_size))
        if not chunk:
            return None, checked
        combos = np.array(chunk, dtype=np.int64)
        members = ((combos @ basis_flat) % p).reshape(len(chunk), n, n)
        best = None  # (point_idx, m, basis_idx, value)
        power = members
        for m in range(1, m_max + 1):
            if m > 1:
                power = np.matmul(power, members) % p
            for b_idx, barr in enumerate(basis_arr):
                vals = np.einsum("kij,ji->k", power, barr) % p
                bad = np.flatnonzero(vals)
                if bad.size:
                    cand = (int(bad[0]), m, b_idx, int(vals[bad[0]]))
                    if best is None or cand[:1] < best[:1] or (
                        cand[0] == best[0] and (cand[1], cand[2]) < (best[1], best[2])
                    ):
                        best = cand
        if best is not None:
            idx, m, b_idx, value = best
            witness = TraceWitness(
                tuple(int(x) for x in chunk[idx]), b_idx, span_basis[b_idx], m, value
            )
            return witness, checked + idx + 1
        checked += len(chunk)


def linear_trace_constraints(p_mat: ExactMatrix, m_max: int) -> tuple[ExactMatrix, ...]:
    """Linear functionals every direction of an all-nilpotent affine space
    through ``p_mat`` must annihilate (a necessary condition only).

    Each functional X -> tr(p_mat^m X), m = 0..m_max, is returned as its
    coefficient matrix C with value sum_{i,j} C[i][j] * X[i][j]; the two
    trace orders coincide by cyclicity, and zero or repeated functionals
    are dropped.
    """
    if not p_mat.is_square:
        raise ValueError("expected a square matrix")
    if not is_nilpotent(p_mat):
        raise NotNilpotentError("base point must be nilpotent")
    field = p_mat.field
    if isinstance(field, PrimeField) and m_max >= field.p:
        raise FieldTooSmallError(
            f"trace constraints need |K| > m_max: |K| = {field.p}, m_max = {m_max}"
        )
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    from .matrices import identity_matrix

    constraints: list[ExactMatrix] = []
    seen = set()
    power = identity_matrix(p_mat.n_rows, field)
    for m in range(m_max + 1):
        if m > 0:
            power = power @ p_mat
        coeff = power.transpose()
        if coeff.is_zero():
            break  # higher powers stay zero
        if coeff.rows not in seen:
            seen.add(coeff.rows)
            constraints.append(coeff)
    return tuple(constraints)
