"""Search for the maximal dimension of affine nilpotent constant-rank spaces.

The search fixes one nilpotent base point in block-shift form per similarity
class (conjugation preserves nilpotency, the rank profile and dimension),
builds a pool of direction candidates whose one-parameter lines through the
base stay nilpotent of the target rank, and extends direction subspaces
depth-first in a fixed candidate order.  Every subspace is reachable through
an increasing sequence of pool candidates, so an uncut run is exhaustive.

Costs are counted in member evaluations against a budget; running out of
budget downgrades the result to a lower bound, it never aborts.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .catalog import conjecture_bound, witness_conjecture
from .errors import FieldTooSmallError
from .fields import FieldSpec, PrimeField
from .matrices import (
    ExactMatrix,
    _is_nilpotent_mod_p,
    _nullspace_mod_p,
    _rank_mod_p,
    is_nilpotent,
    jordan_partition,
    rank,
)
from .partitions import Partition, partitions_of
from .spaces import (
    DEFAULT_BUDGET,
    AffineMatrixSpace,
    verify_all_nilpotent,
    verify_constant_rank,
)

EXHAUSTIVE = "EXHAUSTIVE"
LOWER_BOUND_ONLY = "LOWER_BOUND_ONLY"

CONSISTENT = "CONSISTENT"
WITNESS_EXCEEDS = "WITNESS_EXCEEDS"
UNRESOLVED = "UNRESOLVED"


@dataclass(frozen=True, slots=True)
class CandidatePool:
    """Direction candidates whose whole line through the base passes the
    nilpotent constant-rank test, one canonical representative per line."""

    base: ExactMatrix
    candidates: tuple[ExactMatrix, ...]
    complete: bool
    pruning: str
    lines_tested: int
    pruned_by_rank: int
    pruned_by_trace: int
    evaluations: int


@dataclass(frozen=True, slots=True)
class SearchReport:
    n: int
    r: int
    p: int
    max_dim_found: int
    witness: AffineMatrixSpace
    status: str
    base_points_tried: tuple[Partition, ...]
    nodes_explored: int
    pruned_by_trace: int
    pruned_by_rank: int
    evaluations: int
    budget: int
    pruning: str
    mode: str
    seed: int
    wall_time: float


@dataclass(frozen=True, slots=True)
class ConjectureTest:
    status: str
    n: int
    r: int
    p: int
    conjectured_dimension: int
    lower_bound_dimension: int
    lower_bound_witness: Optional[AffineMatrixSpace]
    search_report: SearchReport
    exceeding_space: Optional[AffineMatrixSpace]
    notes: tuple[str, ...] = ()


class _Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("budget must be >= 1")
        self.limit = limit
        self.used = 0

    def charge(self, k: int = 1) -> bool:
        if self.used + k > self.limit:
            return False
        self.used += k
        return True


# ---------------------------------------------------------------------------
# canonical base points

def canonical_bases(n: int, r: int, field: FieldSpec) -> list[ExactMatrix]:
    """One block-shift matrix per partition of n with n - r nonzero parts
    (the rank of a nilpotent block matrix is n minus its block count)."""
    if not 0 <= r <= n - 1:
        raise ValueError("need 0 <= r <= n-1")
    blocks_wanted = n - r
    out = []
    one, zero = field.one, field.zero
    for part in partitions_of(n):
        sizes = part.nonzero_parts()
        if len(sizes) != blocks_wanted:
            continue
        rows = [[zero] * n for _ in range(n)]
        offset = 0
        for size in sizes:
            for i in range(size - 1):
                rows[offset + i][offset + i + 1] = one
            offset += size
        out.append(ExactMatrix(field, tuple(tuple(row) for row in rows)))
    return out


# ---------------------------------------------------------------------------
# candidate pool

def _flat_to_rows(flat: tuple[int, ...], n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(flat[i * n:(i + 1) * n] for i in range(n))


def _line_count(p: int, dim: int) -> int:
    return (p**dim - 1) // (p - 1)


def _iter_canonical_flats(n_entries: int, p: int) -> Iterator[tuple[int, ...]]:
    """All nonzero vectors with first nonzero entry 1: one per line."""
    for lead in range(n_entries):
        prefix = (0,) * lead + (1,)
        for tail in itertools.product(range(p), repeat=n_entries - 1 - lead):
            yield prefix + tail


def _iter_canonical_kernel(kernel: Sequence[tuple[int, ...]], p: int) -> Iterator[tuple[int, ...]]:
    """One member per line of the span of ``kernel``: lead coefficient 1,
    later coefficients free.  An odometer over the free coefficients keeps a
    stack of partial sums, so each step costs one vector addition."""
    for lead in range(len(kernel)):
        rest = kernel[lead + 1:]
        m = len(rest)
        if m == 0:
            yield kernel[lead]
            continue
        counters = [0] * m
        stack = [kernel[lead]] * (m + 1)
        while True:
            yield stack[m]
            lvl = m - 1
            while lvl >= 0:
                counters[lvl] += 1
                if counters[lvl] < p:
                    vec = rest[lvl]
                    bumped = tuple((x + y) % p for x, y in zip(stack[lvl + 1], vec))
                    for j in range(lvl + 1, m + 1):
                        stack[j] = bumped
                    for j in range(lvl + 1, m):
                        counters[j] = 0
                    break
                counters[lvl] = 0
                lvl -= 1
            if lvl < 0:
                break


def _canonical_line(flat: tuple[int, ...], p: int) -> tuple[int, ...]:
    for v in flat:
        if v:
            if v == 1:
                return flat
            inv = pow(v, -1, p)
            return tuple(x * inv % p for x in flat)
    raise ValueError("zero vector has no line")


def _member_fails(base_rows, cand_rows, t, p, n, r) -> bool:
    """True when base + t*candidate is not nilpotent of rank exactly r."""
    rows = tuple(
        tuple((b + t * a) % p for b, a in zip(brow, arow))
        for brow, arow in zip(base_rows, cand_rows)
    )
    trace = 0
    for i in range(n):
        trace += rows[i][i]
    if trace % p:  # nonzero trace: not nilpotent
        return True
    if _rank_mod_p(rows, p, r) != r:
        return True
    return not _is_nilpotent_mod_p(rows, p)


def _line_passes(base_rows, cand_flat, p, n, r, budget: _Budget):
    """Test base + t*candidate for every t != 0.  Returns (passes, in_budget)."""
    cand_rows = _flat_to_rows(cand_flat, n)
    for t in range(1, p):
        if not budget.charge():
            return False, False
        if _member_fails(base_rows, cand_rows, t, p, n, r):
            return False, True
    return True, True


def build_candidate_pool(
    base: ExactMatrix,
    r: int,
    field: FieldSpec,
    pruning: str = "none",
    budget: int = DEFAULT_BUDGET,
) -> CandidatePool:
    """Enumerate one canonical representative per direction line whose whole
    line through ``base`` is nilpotent of rank exactly r.

    With ``pruning="trace"`` only the common kernel of the linear trace
    constraints of the base is enumerated (sound for |K| >= n+1).  A budget
    cut returns the partial pool flagged ``complete=False`` rather than
    raising, so searches can degrade to lower bounds.
    """
    return _build_pool(base, r, field, pruning, _Budget(budget))


def _build_pool(base, r, field, pruning, budget: _Budget) -> CandidatePool:
    if not isinstance(field, PrimeField):
        raise ValueError("candidate pools are only enumerable over finite fields")
    if pruning not in ("none", "trace"):
        raise ValueError(f"unknown pruning {pruning!r}")
    p = field.p
    n = base.n_rows
    if base.field != field or not base.is_square:
        raise ValueError("base must be square over the given field")
    if rank(base) != r or not is_nilpotent(base):
        raise ValueError("base point must be nilpotent of rank exactly r")
    base_rows = base.rows
    n_entries = n * n

    pruned_by_trace = 0
    if pruning == "trace":
        if p < n + 1:
            raise FieldTooSmallError(
                "trace pruning is only sound for |K| >= n+1"
            )
        from .reduction import linear_trace_constraints

        constraint_rows = [
            tuple(x for row in c.rows for x in row)
            for c in linear_trace_constraints(base, n - 1)
        ]
        kernel = _nullspace_mod_p(constraint_rows, p)
        candidates_iter = (
            _canonical_line(flat, p) for flat in _iter_canonical_kernel(kernel, p)
        )
        pruned_by_trace = _line_count(p, n_entries) - _line_count(p, len(kernel))
    else:
        candidates_iter = _iter_canonical_flats(n_entries, p)

    kept: list[tuple[int, ...]] = []
    lines_tested = 0
    rejected = 0
    complete = True
    for flat in candidates_iter:
        passes, in_budget = _line_passes(base_rows, flat, p, n, r, budget)
        if not in_budget:
            complete = False
            break
        lines_tested += 1
        if passes:
            kept.append(flat)
        else:
            rejected += 1
    kept.sort()
    return CandidatePool(
        base=base,
        candidates=tuple(
            ExactMatrix(field, _flat_to_rows(flat, n)) for flat in kept
        ),
        complete=complete,
        pruning=pruning,
        lines_tested=lines_tested,
        pruned_by_rank=rejected,
        pruned_by_trace=pruned_by_trace,
        evaluations=budget.used,
    )


# ---------------------------------------------------------------------------
# span bookkeeping over F_p

def _reduce_against(echelon: list[tuple[int, tuple[int, ...]]], vec: tuple[int, ...], p: int):
    """Reduce ``vec`` by the echelon rows; return (pivot, normalized vector)
    or None when the vector lies in the span."""
    v = list(vec)
    for piv, row in echelon:
        c = v[piv]
        if c:
            for j in range(len(v)):
                v[j] = (v[j] - c * row[j]) % p
    for piv, x in enumerate(v):
        if x:
            inv = pow(x, -1, p)
            return piv, tuple(y * inv % p for y in v)
    return None


# ---------------------------------------------------------------------------
# the search proper

def _resolve_pruning(pruning: str, p: int, n: int) -> str:
    if pruning == "auto":
        return "trace" if p >= n + 1 else "none"
    if pruning == "trace" and p < n + 1:
        raise FieldTooSmallError("trace pruning is only sound for |K| >= n+1")
    if pruning not in ("none", "trace"):
        raise ValueError(f"unknown pruning {pruning!r}")
    return pruning


def _extension_members(base_flat, zs, cand, p):
    """New member coordinates produced by adjoining ``cand``: z + t*cand."""
    scaled = [tuple(t * a % p for a in cand) for t in range(1, p)]
    return scaled, [
        tuple((z_i + s_i) % p for z_i, s_i in zip(z, s)) for z in zs for s in scaled
    ]


def _extension_valid(base_flat, zs, cand, p, n, r, budget: _Budget):
    cand_rows = _flat_to_rows(cand, n)
    for z in zs:
        bz_rows = _flat_to_rows(
            tuple((b + z_i) % p for b, z_i in zip(base_flat, z)), n
        )
        for t in range(1, p):
            if not budget.charge():
                return False, False
            if _member_fails(bz_rows, cand_rows, t, p, n, r):
                return False, True
    return True, True


def max_affine_dimension(
    n: int,
    r: int,
    field: FieldSpec,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    pruning: str = "auto",
    seed: int = 0,
    restarts: int = 5,
) -> SearchReport:
    """Maximal dimension of an affine space of nilpotent n x n matrices of
    constant rank r over F_p, with a re-verified witness.

    ``mode="exhaustive"`` explores ordered extensions of every candidate
    pool; the result is EXHAUSTIVE when no budget cut occurred anywhere.
    ``mode="greedy"`` runs seeded randomized restarts that repeatedly add
    the candidate keeping the most candidates extendable, for cheap lower
    bounds.  ``pruning="auto"`` enables trace pruning exactly when it is
    sound (|K| >= n+1).
    """
    if not isinstance(field, PrimeField):
        raise ValueError("the search enumerates members; the field must be finite")
    if not 1 <= r <= n - 1:
        raise ValueError("need 1 <= r <= n-1")
    if mode not in ("exhaustive", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")
    p = field.p
    resolved_pruning = _resolve_pruning(pruning, p, n)
    start = time.perf_counter()
    shared = _Budget(budget)
    bases = canonical_bases(n, r, field)
    base_partitions = []

    best_dim = 0
    best_base = bases[0]
    best_dirs: tuple[tuple[int, ...], ...] = ()
    nodes = 0
    pruned_by_trace = 0
    pruned_by_rank = 0
    fully_exhausted = mode == "exhaustive"
    rng = random.Random(seed)

    for base in bases:
        base_partitions.append(jordan_partition(base))
        pool = _build_pool(base, r, field, resolved_pruning, shared)
        pruned_by_trace += pool.pruned_by_trace
        pruned_by_rank += pool.pruned_by_rank
        if not pool.complete:
            fully_exhausted = False
        cands = [tuple(x for row in c.rows for x in row) for c in pool.candidates]
        base_flat = tuple(x for row in base.rows for x in row)

        if mode == "exhaustive":
            result = _dfs_search(
                base_flat, cands, p, n, r, shared, best_dim
            )
            nodes += result["nodes"]
            if result["cut"]:
                fully_exhausted = False
            if result["best_dim"] > best_dim:
                best_dim = result["best_dim"]
                best_base = base
                best_dirs = result["best_dirs"]
        else:
            got = _greedy_search(
                base_flat, cands, p, n, r, shared, rng, restarts
            )
            nodes += got["nodes"]
            if got["best_dim"] > best_dim:
                best_dim = got["best_dim"]
                best_base = base
                best_dirs = got["best_dirs"]

    status = EXHAUSTIVE if (mode == "exhaustive" and fully_exhausted) else LOWER_BOUND_ONLY
    witness = AffineMatrixSpace(
        field, n, best_base,
        tuple(ExactMatrix(field, _flat_to_rows(flat, n)) for flat in best_dirs),
    )
    _reverify_witness(witness, r, best_dim)
    wall = time.perf_counter() - start
    return SearchReport(
        n=n, r=r, p=p, max_dim_found=best_dim, witness=witness, status=status,
        base_points_tried=tuple(base_partitions), nodes_explored=nodes,
        pruned_by_trace=pruned_by_trace, pruned_by_rank=pruned_by_rank,
        evaluations=shared.used, budget=budget, pruning=resolved_pruning,
        mode=mode, seed=seed, wall_time=wall,
    )


def _dfs_search(base_flat, cands, p, n, r, budget: _Budget, initial_best: int):
    """Ordered-extension DFS; ``best_dim`` improves only strictly, so the
    caller keeps the first (lexicographically smallest) witness at a tie."""
    state = {
        "best_dim": initial_best,
        "best_dirs": (),
        "nodes": 0,
        "cut": False,
    }
    zero = (0,) * (n * n)
    echelon: list[tuple[int, tuple[int, ...]]] = []
    chosen: list[tuple[int, ...]] = []

    def rec(start_idx: int, zs: list[tuple[int, ...]]):
        state["nodes"] += 1
        depth = len(chosen)
        if depth > state["best_dim"]:
            state["best_dim"] = depth
            state["best_dirs"] = tuple(chosen)
        for idx in range(start_idx, len(cands)):
            if depth + (len(cands) - idx) <= state["best_dim"]:
                break  # not enough candidates left to improve
            cand = cands[idx]
            red = _reduce_against(echelon, cand, p)
            if red is None:
                continue
            ok, in_budget = _extension_valid(base_flat, zs, cand, p, n, r, budget)
            if not in_budget:
                state["cut"] = True
                return
            if not ok:
                continue
            _, new_members = _extension_members(base_flat, zs, cand, p)
            echelon.append(red)
            chosen.append(cand)
            rec(idx + 1, zs + new_members)
            chosen.pop()
            echelon.pop()
            if state["cut"]:
                return

    rec(0, [zero])
    return state


def _greedy_search(base_flat, cands, p, n, r, budget: _Budget, rng, restarts: int):
    state = {"best_dim": 0, "best_dirs": (), "nodes": 0}
    for _ in range(max(1, restarts)):
        order = list(range(len(cands)))
        rng.shuffle(order)
        echelon: list[tuple[int, tuple[int, ...]]] = []
        chosen: list[tuple[int, ...]] = []
        zs = [(0,) * (n * n)]
        while True:
            state["nodes"] += 1
            extendable = []
            for idx in order:
                cand = cands[idx]
                if _reduce_against(echelon, cand, p) is None:
                    continue
                ok, in_budget = _extension_valid(base_flat, zs, cand, p, n, r, budget)
                if not in_budget:
                    extendable = []
                    break
                if ok:
                    extendable.append(idx)
            if not extendable:
                break
            # pick the extension that keeps the most candidates extendable
            best_idx = None
            best_score = -1
            picks = []
            for idx in extendable:
                cand = cands[idx]
                _, new_members = _extension_members(base_flat, zs, cand, p)
                trial_zs = zs + new_members
                red = _reduce_against(echelon, cand, p)
                echelon.append(red)
                score = 0
                for jdx in extendable:
                    if jdx == idx:
                        continue
                    if _reduce_against(echelon, cands[jdx], p) is None:
                        continue
                    ok, in_budget = _extension_valid(
                        base_flat, trial_zs, cands[jdx], p, n, r, budget
                    )
                    if not in_budget:
                        break
                    if ok:
                        score += 1
                echelon.pop()
                picks.append((score, idx))
                if score > best_score:
                    best_score = score
                    best_idx = idx
            ties = [idx for score, idx in picks if score == best_score]
            best_idx = ties[0] if len(ties) == 1 else rng.choice(ties)
            cand = cands[best_idx]
            red = _reduce_against(echelon, cand, p)
            echelon.append(red)
            chosen.append(cand)
            _, new_members = _extension_members(base_flat, zs, cand, p)
            zs = zs + new_members
        if len(chosen) > state["best_dim"]:
            state["best_dim"] = len(chosen)
            state["best_dirs"] = tuple(chosen)
    return state


def _reverify_witness(witness: AffineMatrixSpace, r: int, claimed_dim: int):
    """Soundness gate: a reported witness must re-verify independently."""
    if witness.d != claimed_dim:
        raise AssertionError("witness dimension does not match the report")
    nilp = verify_all_nilpotent(witness, sample_count=0)
    ranks = verify_constant_rank(witness, r, sample_count=0)
    if nilp.status != "PROVED" or ranks.status != "PROVED":
        raise AssertionError("search produced a witness that fails re-verification")


# ---------------------------------------------------------------------------
# conjecture testing

def test_conjecture(
    n: int,
    r: int,
    field: FieldSpec,
    budget: int = DEFAULT_BUDGET,
    pruning: str = "auto",
    seed: int = 0,
) -> ConjectureTest:
    """Compare the conjectured maximal dimension against a verified witness
    (lower bound) and the search (upper side) over one finite field.

    CONSISTENT: exhaustive search matched the conjectured value.
    WITNESS_EXCEEDS: a verified space of larger dimension exists over this
    field (possible below the field-size hypothesis).
    UNRESOLVED: the budget ran out before the search was exhaustive.
    """
    if not isinstance(field, PrimeField):
        raise ValueError("conjecture testing enumerates members over F_p")
    bound = conjecture_bound(n, r)
    lower_witness = witness_conjecture(n, r, field, budget)
    report = max_affine_dimension(
        n, r, field, mode="exhaustive", budget=budget, pruning=pruning, seed=seed
    )
    lower = max(report.max_dim_found, lower_witness.d if lower_witness else 0)
    notes: list[str] = []
    exceeding = None
    if report.max_dim_found > bound:
        status = WITNESS_EXCEEDS
        exceeding = report.witness
        notes.append(
            f"verified dimension {report.max_dim_found} exceeds the conjectured "
            f"{bound} over F_{field.p}; the conjecture assumes a sufficiently "
            "large field"
        )
    elif report.status == EXHAUSTIVE and report.max_dim_found == bound:
        status = CONSISTENT
    elif report.status == EXHAUSTIVE:
        if lower_witness is not None:
            raise AssertionError(
                "exhaustive search found less than a verified witness dimension"
            )
        status = UNRESOLVED
        notes.append(
            f"exhaustive search over F_{field.p} found {report.max_dim_found} < "
            f"{bound}; the field may be below the conjecture's size hypothesis"
        )
    else:
        status = UNRESOLVED
        if lower == bound:
            notes.append(
                f"lower bound {bound} achieved by a verified witness; "
                "exhaustion did not finish within budget"
            )
        else:
            notes.append("search was cut by budget before reaching the lower bound")
    return ConjectureTest(
        status=status, n=n, r=r, p=field.p, conjectured_dimension=bound,
        lower_bound_dimension=lower, lower_bound_witness=lower_witness,
        search_report=report, exceeding_space=exceeding, notes=tuple(notes),
    )
