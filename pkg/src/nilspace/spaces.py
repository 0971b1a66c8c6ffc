"""Affine matrix spaces and the verification oracles.

An affine space is a base matrix plus a linearly independent list of
direction matrices.  Verification decides "every member is nilpotent" and
"every member has rank exactly r" with exact certificates:

* over a finite field, exhaustive member enumeration decides everything;
* polynomial-identity claims (nilpotency, rank upper bounds) are also
  provable on a product grid: each entry of a member's n-th power, and each
  (r+1)-minor, has degree at most n in every coefficient, so vanishing on a
  grid with n+1 distinct values per coordinate forces identical vanishing;
* over the rationals the rank lower bound is not a polynomial identity and
  is only ever sampled.

Outcomes record the method used so a PROVED status never rests on sampling.
"""

from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import BudgetExceededError, DependentDirectionsError, PreconditionUnmetError
from .fields import FieldSpec, PrimeField, RawScalar
from .matrices import (
    ExactMatrix,
    _is_nilpotent_mod_p,
    _matmul_frac,
    _rank_frac,
    _rank_mod_p,
    _rows_is_zero,
    inverse,
    shift_matrix,
)

#: Default cap on member evaluations per verification call.
DEFAULT_BUDGET = 10_000_000
#: Default number of random points when falling back to sampling.
DEFAULT_SAMPLES = 1000

PROVED = "PROVED"
REFUTED = "REFUTED"
SAMPLED_PASS = "SAMPLED_PASS"

_METHOD_STRENGTH = {"random": 0, "grid": 1, "exhaustive": 2}

# numpy batching pays off only for large point sets and word-size moduli
_NUMPY_MIN_POINTS = 4096
_NUMPY_CHUNK = 1 << 17


@dataclass(frozen=True, slots=True)
class Witness:
    """Coefficient vector and the member matrix it selects."""

    coefficients: tuple[RawScalar, ...]
    matrix: ExactMatrix


@dataclass(frozen=True, slots=True)
class VerificationOutcome:
    status: str
    method: str
    checks_performed: int
    witness: Optional[object] = None
    sample_count: Optional[int] = None
    seed: Optional[int] = None
    notes: tuple[str, ...] = ()

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED


@dataclass(frozen=True, slots=True)
class AffineMatrixSpace:
    """Base point plus an independent tuple of direction matrices."""

    field: FieldSpec
    n: int
    base: ExactMatrix
    directions: tuple[ExactMatrix, ...]

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError("n must be >= 1")
        mats = (self.base,) + tuple(self.directions)
        for m in mats:
            if m.field != self.field:
                raise ValueError("all matrices must share the space's field")
            if m.n_rows != n or m.n_cols != n:
                raise ValueError(f"expected {n}x{n} matrices")
        if self.directions:
            flat = [tuple(x for row in m.rows for x in row) for m in self.directions]
            if isinstance(self.field, PrimeField):
                r = _rank_mod_p(flat, self.field.p)
            else:
                r = _rank_frac(flat)
            if r != len(self.directions):
                raise DependentDirectionsError(
                    "direction matrices are linearly dependent"
                )

    @property
    def d(self) -> int:
        return len(self.directions)

    def member(self, t: Sequence) -> ExactMatrix:
        """The member selected by coefficient vector ``t`` (length d)."""
        if len(t) != self.d:
            raise ValueError(f"expected {self.d} coefficients, got {len(t)}")
        coeffs = [self.field.normalize(x) for x in t]
        rows = _combine_rows(self.base.rows, [m.rows for m in self.directions],
                             coeffs, self.field)
        return ExactMatrix(self.field, rows)

    def direction_span_space(self) -> "AffineMatrixSpace":
        """The same directions attached to a zero base point."""
        zero = ExactMatrix.zeros(self.n, self.n, self.field)
        return AffineMatrixSpace(self.field, self.n, zero, self.directions)


# ---------------------------------------------------------------------------
# point generation

def _combine_rows(base_rows, dir_rows_list, coeffs, field):
    rows = base_rows
    add, mul = field.add, field.mul
    zero = field.zero
    for c, drows in zip(coeffs, dir_rows_list):
        if c == zero:
            continue
        rows = tuple(
            tuple(add(x, mul(c, y)) for x, y in zip(r1, r2))
            for r1, r2 in zip(rows, drows)
        )
    return rows


def _iter_members(base_rows, dir_rows_list, values, field) -> Iterator[tuple[tuple, tuple]]:
    """Yield (t, member_rows) over the grid ``values^d`` in product order,
    accumulating partial sums so each step costs one scaled addition."""
    d = len(dir_rows_list)
    if d == 0:
        yield (), base_rows
        return
    add, mul = field.add, field.mul
    zero = field.zero

    def scaled_add(rows, drows, c):
        if c == zero:
            return rows
        return tuple(
            tuple(add(x, mul(c, y)) for x, y in zip(r1, r2))
            for r1, r2 in zip(rows, drows)
        )

    prefix: list = []

    def rec(level, partial):
        if level == d:
            yield tuple(prefix), partial
            return
        drows = dir_rows_list[level]
        for v in values:
            prefix.append(v)
            yield from rec(level + 1, scaled_add(partial, drows, v))
            prefix.pop()

    yield from rec(0, base_rows)


def _scan(base_rows, dir_rows_list, values, field, fails) -> tuple[Optional[tuple], Optional[tuple], int]:
    """Return (t, member_rows, checks) for the first violating point, or
    (None, None, total_checked) when the whole grid passes."""
    checked = 0
    for t, rows in _iter_members(base_rows, dir_rows_list, values, field):
        checked += 1
        if fails(rows):
            return t, rows, checked
    return None, None, checked


def _numpy_usable(field: FieldSpec, n: int) -> bool:
    return isinstance(field, PrimeField) and n * (field.p - 1) ** 2 < 2**62


def _scan_nilpotency_numpy(base_rows, dir_rows_list, values, p, n):
    """Vectorized nilpotency scan over the grid; exact int64 arithmetic."""
    d = len(dir_rows_list)
    base_vec = np.array([x for row in base_rows for x in row], dtype=np.int64)
    dir_mat = np.array(
        [[x for row in rows for x in row] for rows in dir_rows_list], dtype=np.int64
    )
    checked = 0
    point_iter = itertools.product(values, repeat=d)
    while True:
        chunk = list(itertools.islice(point_iter, _NUMPY_CHUNK))
        if not chunk:
            return None, None, checked
        combos = np.array(chunk, dtype=np.int64)
        members = (combos @ dir_mat + base_vec) % p
        power = members.reshape(len(chunk), n, n)
        span = 1
        while span < n:
            power = np.matmul(power, power) % p
            span *= 2
        bad = power.reshape(len(chunk), -1).any(axis=1)
        idx = np.flatnonzero(bad)
        if idx.size:
            first = int(idx[0])
            checked += first + 1
            t = tuple(int(x) for x in chunk[first])
            rows = tuple(
                tuple(int(x) for x in row)
                for row in members[first].reshape(n, n)
            )
            return t, rows, checked
        checked += len(chunk)


# ---------------------------------------------------------------------------
# outcome plumbing

def _fails_nilpotency(field: FieldSpec, n: int) -> Callable:
    if isinstance(field, PrimeField):
        p = field.p
        return lambda rows: not _is_nilpotent_mod_p(rows, p)

    def fails(rows):
        power = rows
        span = 1
        while True:
            if _rows_is_zero(power):
                return False
            if span >= n:
                return True
            power = _matmul_frac(power, power)
            span *= 2

    return fails


def _rank_of_rows(rows, field) -> int:
    if isinstance(field, PrimeField):
        return _rank_mod_p(rows, field.p)
    return _rank_frac(rows)


def _refuted(space: AffineMatrixSpace, t, rows, checks, method, fails,
             sample_count=None, seed=None, notes=()) -> VerificationOutcome:
    witness = Witness(tuple(t), ExactMatrix(space.field, rows))
    if not fails(witness.matrix.rows):  # a witness must re-fail when rechecked
        raise AssertionError("refutation witness does not re-fail the predicate")
    return VerificationOutcome(
        status=REFUTED, method=method, checks_performed=checks, witness=witness,
        sample_count=sample_count, seed=seed, notes=tuple(notes),
    )


def _sample_points(space: AffineMatrixSpace, sample_count: int, seed: int):
    rng = random.Random(seed)
    field = space.field
    d = space.d
    if isinstance(field, PrimeField):
        p = field.p
        for _ in range(sample_count):
            yield tuple(rng.randrange(p) for _ in range(d))
    else:
        for _ in range(sample_count):
            yield tuple(Fraction(rng.randint(-10**6, 10**6)) for _ in range(d))


def _run_sampling(space, fails, sample_count, seed, notes) -> VerificationOutcome:
    if sample_count <= 0:
        raise BudgetExceededError(
            "verification budget exceeded and sampling is disabled"
        )
    dir_rows = [m.rows for m in space.directions]
    checked = 0
    for t in _sample_points(space, sample_count, seed):
        rows = _combine_rows(space.base.rows, dir_rows, list(t), space.field)
        checked += 1
        if fails(rows):
            return _refuted(space, t, rows, checked, "random", fails,
                            sample_count=sample_count, seed=seed, notes=notes)
    return VerificationOutcome(
        status=SAMPLED_PASS, method="random", checks_performed=checked,
        sample_count=sample_count, seed=seed, notes=tuple(notes),
    )


def combine_outcomes(*outcomes: VerificationOutcome) -> VerificationOutcome:
    """Merge sub-verifications: any REFUTED wins, else the weakest method
    and status win.  Check counts add; notes concatenate."""
    if not outcomes:
        raise ValueError("nothing to combine")
    checks = sum(o.checks_performed for o in outcomes)
    notes = tuple(note for o in outcomes for note in o.notes)
    for o in outcomes:
        if o.refuted:
            return VerificationOutcome(
                status=REFUTED, method=o.method, checks_performed=checks,
                witness=o.witness, sample_count=o.sample_count, seed=o.seed,
                notes=notes,
            )
    weakest = min(outcomes, key=lambda o: _METHOD_STRENGTH[o.method])
    status = PROVED if all(o.proved for o in outcomes) else SAMPLED_PASS
    return VerificationOutcome(
        status=status, method=weakest.method, checks_performed=checks,
        sample_count=weakest.sample_count, seed=weakest.seed, notes=notes,
    )


# ---------------------------------------------------------------------------
# verification oracles

def _choose_points(space: AffineMatrixSpace, degree: int, method: str):
    """Pick evaluation values and the method label they justify.

    ``degree`` bounds the per-variable degree of the polynomial identity
    being tested; a grid needs ``degree + 1`` distinct values per coordinate.
    """
    field = space.field
    if isinstance(field, PrimeField):
        p = field.p
        if method == "exhaustive" or (method == "auto" and p <= degree + 1):
            return list(range(p)), "exhaustive"
        if p < degree + 1:
            raise ValueError(
                f"a grid certificate needs {degree + 1} distinct values; |K| = {p}"
            )
        return list(range(degree + 1)), "grid"
    if method == "exhaustive":
        raise ValueError("cannot enumerate the rationals exhaustively")
    return [Fraction(i) for i in range(degree + 1)], "grid"


def verify_all_nilpotent(
    space: AffineMatrixSpace,
    budget: int = DEFAULT_BUDGET,
    *,
    method: str = "auto",
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> VerificationOutcome:
    """Decide whether every member of the space is nilpotent.

    Each entry of a member's n-th power has degree <= n in every coefficient,
    so vanishing on a grid with n+1 values per coordinate proves vanishing
    everywhere; over F_p with p <= n+1 the full field is enumerated instead,
    which is exact regardless of the grid argument.  When the required point
    count exceeds ``budget`` the check falls back to seeded random sampling
    (status at best SAMPLED_PASS), unless ``sample_count`` is 0, in which
    case BudgetExceededError is raised.
    """
    if method not in ("auto", "exhaustive", "grid", "random"):
        raise ValueError(f"unknown method {method!r}")
    n = space.n
    fails = _fails_nilpotency(space.field, n)
    if method == "random":
        return _run_sampling(space, fails, sample_count, seed, ())
    values, used = _choose_points(space, n, method)
    total = len(values) ** space.d
    if total > budget:
        if method != "auto":
            raise BudgetExceededError(
                f"{total} points exceed the budget of {budget}"
            )
        return _run_sampling(
            space, fails, sample_count, seed,
            (f"grid of {total} points exceeded budget {budget}; sampled instead",),
        )
    dir_rows = [m.rows for m in space.directions]
    if (
        used in ("exhaustive", "grid")
        and total >= _NUMPY_MIN_POINTS
        and _numpy_usable(space.field, n)
    ):
        t, rows, checked = _scan_nilpotency_numpy(
            space.base.rows, dir_rows, values, space.field.p, n
        )
    else:
        t, rows, checked = _scan(space.base.rows, dir_rows, values, space.field, fails)
    if t is not None:
        return _refuted(space, t, rows, checked, used, fails)
    return VerificationOutcome(status=PROVED, method=used, checks_performed=checked)


def verify_constant_rank(
    space: AffineMatrixSpace,
    r: int,
    budget: int = DEFAULT_BUDGET,
    *,
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> VerificationOutcome:
    """Decide whether every member has rank exactly ``r``.

    The upper bound (rank <= r everywhere) is a polynomial identity — all
    (r+1)-minors vanish — and admits a grid certificate.  The lower bound is
    not; over a finite field it is settled by exhaustive enumeration, while
    over the rationals it is only sampled and the outcome is capped at
    SAMPLED_PASS.
    """
    n = space.n
    if not 0 <= r <= n:
        raise ValueError(f"rank must lie in [0, {n}]")
    field = space.field
    dir_rows = [m.rows for m in space.directions]

    def fails_exact(rows):
        return _rank_of_rows(rows, field) != r

    if isinstance(field, PrimeField):
        total = field.p ** space.d
        if total <= budget:
            values = list(range(field.p))
            t, rows, checked = _scan(space.base.rows, dir_rows, values, field, fails_exact)
            if t is not None:
                return _refuted(space, t, rows, checked, "exhaustive", fails_exact)
            return VerificationOutcome(
                status=PROVED, method="exhaustive", checks_performed=checked
            )

    # budget rules out exhaustion (always the case over the rationals)
    parts = []
    if r >= n:
        parts.append(VerificationOutcome(
            status=PROVED, method="exhaustive", checks_performed=0,
            notes=(f"rank <= {n} holds for every {n}x{n} matrix",),
        ))
    else:
        def fails_upper(rows):
            return _rank_of_rows(rows, field) > r

        try:
            values, used = _choose_points(space, n, "grid")
        except ValueError:
            values, used = None, None
        if values is not None and len(values) ** space.d <= budget:
            t, rows, checked = _scan(space.base.rows, dir_rows, values, field, fails_upper)
            if t is not None:
                return _refuted(space, t, rows, checked, used, fails_upper)
            parts.append(VerificationOutcome(
                status=PROVED, method=used, checks_performed=checked,
                notes=(f"rank <= {r} proved by vanishing of all {r + 1}-minors on a grid",),
            ))

    if r == 0:
        parts.append(VerificationOutcome(
            status=PROVED, method="exhaustive", checks_performed=0,
            notes=("rank >= 0 is vacuous",),
        ))
    if len(parts) == 2 and all(part.proved for part in parts):
        return combine_outcomes(*parts)

    note = (
        "rank lower bound is not a polynomial identity; sampled only"
        if not isinstance(field, PrimeField)
        else f"member count exceeds budget {budget}; sampled"
    )
    sampled = _run_sampling(space, fails_exact, sample_count, seed, (note,))
    parts.append(sampled)
    return combine_outcomes(*parts)


def direction_nilpotency(
    space: AffineMatrixSpace,
    budget: int = DEFAULT_BUDGET,
    *,
    method: str = "auto",
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> VerificationOutcome:
    """Verify that every member of the direction span alone is nilpotent.

    For an all-nilpotent affine space over a field with at least n+1
    elements this is implied; over smaller fields it can genuinely fail, so
    a warning note is attached when the hypothesis does not hold.
    """
    notes = ()
    field = space.field
    if isinstance(field, PrimeField) and field.p < space.n + 1:
        msg = (
            f"|K| = {field.p} < n + 1 = {space.n + 1}: direction nilpotency is "
            "not implied by member nilpotency at this field size"
        )
        warnings.warn(msg, UserWarning, stacklevel=2)
        notes = (msg,)
    outcome = verify_all_nilpotent(
        space.direction_span_space(), budget,
        method=method, sample_count=sample_count, seed=seed,
    )
    return VerificationOutcome(
        status=outcome.status, method=outcome.method,
        checks_performed=outcome.checks_performed, witness=outcome.witness,
        sample_count=outcome.sample_count, seed=outcome.seed,
        notes=notes + outcome.notes,
    )


def corner_entry_check(space: AffineMatrixSpace) -> VerificationOutcome:
    """For a space based at the shift matrix, check that every direction
    basis matrix has a zero lower-left entry (sufficient by linearity).

    Intended for spaces already proved all-nilpotent over a field with at
    least n+1 elements, where the entry must vanish; used as a consistency
    cross-check rather than an assumption.
    """
    n = space.n
    field = space.field
    if space.base != shift_matrix(n, field):
        raise PreconditionUnmetError("base point must be the shift matrix")
    notes = ()
    if isinstance(field, PrimeField) and field.p < n + 1:
        msg = f"|K| = {field.p} < n + 1 = {n + 1}: corner vanishing is not implied"
        warnings.warn(msg, UserWarning, stacklevel=2)
        notes = (msg,)
    zero = field.zero
    for idx, mat in enumerate(space.directions):
        if mat.rows[n - 1][0] != zero:
            unit = tuple(
                field.one if k == idx else field.zero for k in range(space.d)
            )
            return VerificationOutcome(
                status=REFUTED, method="exhaustive", checks_performed=idx + 1,
                witness=Witness(unit, mat), notes=notes,
            )
    return VerificationOutcome(
        status=PROVED, method="exhaustive", checks_performed=space.d, notes=notes,
    )


def change_basis(space: AffineMatrixSpace, q: ExactMatrix) -> AffineMatrixSpace:
    """Conjugate the whole space by an invertible matrix."""
    if q.field != space.field:
        raise ValueError("basis change matrix over a different field")
    if q.n_rows != space.n or q.n_cols != space.n:
        raise ValueError(f"expected a {space.n}x{space.n} matrix")
    q_inv = inverse(q)  # raises SingularMatrixError when not invertible
    return AffineMatrixSpace(
        space.field,
        space.n,
        q @ space.base @ q_inv,
        tuple(q @ a @ q_inv for a in space.directions),
    )
