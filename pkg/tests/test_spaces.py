import itertools
import random

import pytest

from nilspace import (
    AffineMatrixSpace,
    BudgetExceededError,
    DependentDirectionsError,
    ExactMatrix,
    PreconditionUnmetError,
    PrimeField,
    RATIONALS,
    SingularMatrixError,
    change_basis,
    combine_outcomes,
    corner_entry_check,
    counterexample_f2,
    direction_nilpotency,
    identity_matrix,
    jordan_partition,
    nilindex,
    rank,
    shift_matrix,
    unit_matrix,
    verify_all_nilpotent,
    verify_constant_rank,
    witness_rank_full,
    witness_rank_one,
)

F3 = PrimeField(3)
F5 = PrimeField(5)
F7 = PrimeField(7)


def _space(field, n, base, dirs):
    return AffineMatrixSpace(field, n, base, tuple(dirs))


def test_space_validation():
    j = shift_matrix(3, F5)
    e = unit_matrix(0, 2, 3, F5)
    with pytest.raises(DependentDirectionsError):
        _space(F5, 3, j, [e, e.scale(2)])
    with pytest.raises(ValueError):
        _space(F5, 3, shift_matrix(2, F5), [])
    with pytest.raises(ValueError):
        _space(F5, 3, j, [unit_matrix(0, 1, 3, F7)])


def test_member_examples():
    w = witness_rank_one(3, F5)
    assert w.member([0]) == w.base
    assert w.member([1]) == w.base + w.directions[0]
    expected = ExactMatrix.from_rows(F5, [[0, 1, 2], [0, 0, 0], [0, 0, 0]])
    assert w.member([2]) == expected
    with pytest.raises(ValueError):
        w.member([1, 2])


def test_member_is_affine():
    w = witness_rank_full(4, F5)
    rng = random.Random(0)
    for _ in range(20):
        t1 = [rng.randrange(5) for _ in range(w.d)]
        t2 = [rng.randrange(5) for _ in range(w.d)]
        lhs = w.member(t1) + w.member(t2) - w.member([0] * w.d)
        rhs = w.member([(a + b) % 5 for a, b in zip(t1, t2)])
        assert lhs == rhs


def test_verify_all_nilpotent_proved_exhaustive():
    out = verify_all_nilpotent(witness_rank_full(4, F5))
    assert out.status == "PROVED"
    assert out.method == "exhaustive"
    assert out.checks_performed == 125


def test_verify_all_nilpotent_refuted_at_identity_base():
    space = _space(F5, 2, identity_matrix(2, F5), [unit_matrix(0, 1, 2, F5)])
    out = verify_all_nilpotent(space)
    assert out.status == "REFUTED"
    assert out.witness.coefficients == (0,)
    assert out.witness.matrix == identity_matrix(2, F5)


def test_verify_all_nilpotent_refuted_lower_corner_direction():
    # det(shift + t*unit(n-1, 0)) = +/- t, so every t != 0 is a witness
    space = _space(F5, 4, shift_matrix(4, F5), [unit_matrix(3, 0, 4, F5)])
    out = verify_all_nilpotent(space)
    assert out.status == "REFUTED"
    assert out.witness.coefficients == (1,)


def test_grid_and_exhaustive_agree_over_larger_field():
    space = witness_rank_full(3, F7)
    grid = verify_all_nilpotent(space, method="grid")
    full = verify_all_nilpotent(space, method="exhaustive")
    assert grid.status == full.status == "PROVED"
    assert grid.method == "grid" and full.method == "exhaustive"
    assert grid.checks_performed == 4 and full.checks_performed == 7


def test_grid_refutation_matches_exhaustive():
    space = _space(F7, 2, identity_matrix(2, F7), [unit_matrix(0, 1, 2, F7)])
    grid = verify_all_nilpotent(space, method="grid")
    full = verify_all_nilpotent(space, method="exhaustive")
    assert grid.status == full.status == "REFUTED"
    assert grid.witness.coefficients == full.witness.coefficients


def test_rational_grid_certificate():
    space = witness_rank_full(4, RATIONALS)
    out = verify_all_nilpotent(space)
    assert out.status == "PROVED"
    assert out.method == "grid"
    assert out.checks_performed == 5**3


def test_verify_constant_rank_examples():
    assert verify_constant_rank(witness_rank_full(4, F5), 3).status == "PROVED"
    assert verify_constant_rank(witness_rank_one(5, F3), 1).status == "PROVED"
    e12 = unit_matrix(0, 1, 2, F5)
    space = _space(F5, 2, e12, [e12])
    out = verify_constant_rank(space, 1)
    assert out.status == "REFUTED"
    assert out.witness.coefficients == (4,)  # t = -1 kills the single entry
    assert rank(out.witness.matrix) == 0


def test_verify_constant_rank_rational_is_sampled():
    space = witness_rank_one(4, RATIONALS)
    out = verify_constant_rank(space, 1)
    assert out.status == "SAMPLED_PASS"
    assert out.method == "random"
    assert any("not a polynomial identity" in note for note in out.notes)


def test_verify_constant_rank_rational_grid_refutes_upper_bound():
    space = witness_rank_one(3, RATIONALS)
    out = verify_constant_rank(space, 0)
    assert out.status == "REFUTED"  # members have rank 1 on the grid


def test_budget_exhaustion_falls_back_to_sampling():
    space = witness_rank_full(4, F5)
    out = verify_all_nilpotent(space, budget=10, sample_count=50, seed=3)
    assert out.status == "SAMPLED_PASS"
    assert out.method == "random"
    assert out.sample_count == 50 and out.seed == 3
    with pytest.raises(BudgetExceededError):
        verify_all_nilpotent(space, budget=10, sample_count=0)


def test_sampling_never_proves():
    space = witness_rank_full(4, F5)
    out = verify_all_nilpotent(space, method="random", sample_count=20)
    assert out.status == "SAMPLED_PASS"


def test_direction_nilpotency_examples():
    out = direction_nilpotency(witness_rank_full(4, F5))
    assert out.status == "PROVED"
    space = _space(F5, 2, shift_matrix(2, F5), [identity_matrix(2, F5)])
    assert direction_nilpotency(space).status == "REFUTED"
    with pytest.warns(UserWarning):
        out = direction_nilpotency(counterexample_f2())
    assert out.status == "REFUTED"
    assert out.witness.coefficients == (1,)


def test_corner_entry_check():
    assert corner_entry_check(witness_rank_full(5, F7)).status == "PROVED"
    bad = _space(F5, 3, shift_matrix(3, F5), [unit_matrix(2, 0, 3, F5)])
    out = corner_entry_check(bad)
    assert out.status == "REFUTED"
    assert out.witness.matrix == unit_matrix(2, 0, 3, F5)
    with pytest.raises(PreconditionUnmetError):
        corner_entry_check(witness_rank_one(3, F5))


def test_nilpotency_implies_direction_nilpotency_at_large_fields():
    # re-derivation: for |K| >= n+1, member nilpotency forces direction
    # nilpotency; a failure here would be a bug
    for space in (witness_rank_full(4, F5), witness_rank_one(4, F5),
                  witness_rank_full(3, F7)):
        assert verify_all_nilpotent(space).status == "PROVED"
        assert direction_nilpotency(space).status == "PROVED"
        if space.base == shift_matrix(space.n, space.field):
            assert corner_entry_check(space).status == "PROVED"


def test_proved_space_members_all_nilpotent_by_independent_enumeration():
    space = witness_rank_full(4, F7)
    assert verify_all_nilpotent(space, method="grid").status == "PROVED"
    count = 0
    for t in itertools.product(range(7), repeat=space.d):
        k = nilindex(space.member(t))
        assert k is not None and k <= 4
        count += 1
    assert count == 7**3


def test_change_basis_examples():
    space = witness_rank_full(3, F5)
    assert change_basis(space, identity_matrix(3, F5)) == space
    rng = random.Random(7)
    for _ in range(5):
        while True:
            q = ExactMatrix.from_rows(
                F5, [[rng.randrange(5) for _ in range(3)] for _ in range(3)]
            )
            if rank(q) == 3:
                break
        moved = change_basis(space, q)
        assert verify_all_nilpotent(moved).status == "PROVED"
        assert verify_constant_rank(moved, 2).status == "PROVED"
        for _ in range(10):
            t = [rng.randrange(5) for _ in range(space.d)]
            assert jordan_partition(space.member(t)) == jordan_partition(moved.member(t))
    with pytest.raises(SingularMatrixError):
        change_basis(space, ExactMatrix.zeros(3, 3, F5))


def test_change_basis_preserves_refutation_status():
    space = _space(F5, 2, identity_matrix(2, F5), [unit_matrix(0, 1, 2, F5)])
    q = ExactMatrix.from_rows(F5, [[1, 2], [0, 1]])
    assert verify_all_nilpotent(change_basis(space, q)).status == "REFUTED"


def test_combine_outcomes_rules():
    from nilspace.spaces import VerificationOutcome

    proved = VerificationOutcome("PROVED", "exhaustive", 10)
    grid = VerificationOutcome("PROVED", "grid", 5)
    sampled = VerificationOutcome("SAMPLED_PASS", "random", 3, sample_count=3, seed=1)
    refuted = VerificationOutcome("REFUTED", "exhaustive", 2, witness="w")
    assert combine_outcomes(proved, grid).status == "PROVED"
    assert combine_outcomes(proved, grid).method == "grid"
    assert combine_outcomes(proved, sampled).status == "SAMPLED_PASS"
    out = combine_outcomes(proved, refuted, sampled)
    assert out.status == "REFUTED" and out.witness == "w"
    assert combine_outcomes(proved, sampled).checks_performed == 13


def test_member_accepts_scalars_and_fractions():
    w = witness_rank_one(3, F5)
    assert w.member([F5.scalar(2)]) == w.member([2]) == w.member([7])
    q = witness_rank_one(3, RATIONALS)
    from fractions import Fraction

    assert q.member(["1/2"]) == q.member([Fraction(1, 2)])


def test_batched_and_pure_nilpotency_scans_agree():
    from nilspace.spaces import _fails_nilpotency, _scan, _scan_nilpotency_numpy

    w = witness_rank_full(4, F7)
    dir_rows = [m.rows for m in w.directions]
    values = list(range(5))
    pure = _scan(w.base.rows, dir_rows, values, F7, _fails_nilpotency(F7, 4))
    batched = _scan_nilpotency_numpy(w.base.rows, dir_rows, values, 7, 4)
    assert pure == batched  # both PROVED with identical point counts

    bad = _space(
        F7, 4, shift_matrix(4, F7),
        [unit_matrix(0, 2, 4, F7), unit_matrix(3, 0, 4, F7)],
    )
    dir_rows = [m.rows for m in bad.directions]
    pure = _scan(bad.base.rows, dir_rows, values, F7, _fails_nilpotency(F7, 4))
    batched = _scan_nilpotency_numpy(bad.base.rows, dir_rows, values, 7, 4)
    assert pure == batched  # same first witness, same check count
    assert pure[0] is not None


def test_witness_recheck_guarantee():
    space = _space(F5, 4, shift_matrix(4, F5), [unit_matrix(3, 0, 4, F5)])
    out = verify_all_nilpotent(space)
    member = space.member(out.witness.coefficients)
    assert member == out.witness.matrix
    assert nilindex(member) is None
