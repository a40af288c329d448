import math
from dataclasses import dataclass, field

from core.bitset import BitMatrix, drop_bit, full_mask, popcount, to_indices
from core.errors import ValidationError

ADD = "add"
REMOVE = "remove"


class SetSystem:
    """
    A set system (U, S): the private input of Partial Set Cover.

    Mathematical Foundation:
    ========================

    1. Universe and sets:
       U = {0, ..., n-1},  S = {S_0, ..., S_{m-1}},  S_i ⊆ U

    2. Coverage of a family F ⊆ [m]:
       cov(F) = |∪_{i ∈ F} S_i|

    3. Marginal gain of S w.r.t. the covered elements C:
       gain(S | C) = |S \\ C| = |S ∩ U_C|,  U_C = U \\ C

    4. Neighbouring systems differ by exactly one universe element u together
       with its memberships. Every gain changes by at most 1 between neighbours,
       which is the sensitivity both private solvers rely on.

    Representation:
    ===============
    Each set is an integer bit-set over the universe (bit e set <=> e ∈ S_i),
    held in a BitMatrix. Instances are immutable after construction.

    Args:
        n (int): Universe size.
        masks (iterable of int): One bit-set per set id, in set-id order.

    Examples:
        system = SetSystem.from_sets(3, [[0, 1], [1, 2]])
        coverage_count(system, [0, 1])   # 3
    """

    def __init__(self, n: int, masks):
        if n < 0:
            raise ValidationError("n must be non-negative")
        try:
            self._incidence = BitMatrix(masks, n)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        self.n = n

    @classmethod
    def from_sets(cls, n: int, sets, m: int = None):
        """
        Build a system from explicit member lists.

        Raises:
            ValidationError: element id outside [0, n), duplicate element in a set,
                or more sets than the declared m.
        """
        sets = [list(members) for members in sets]
        if m is None:
            m = len(sets)
        if len(sets) > m:
            raise ValidationError(f"{len(sets)} sets given but m = {m}")
        masks = []
        for set_id, members in enumerate(sets):
            mask = 0
            for e in members:
                if not 0 <= e < n:
                    raise ValidationError(f"set {set_id}: element {e} outside [0, {n})")
                if (mask >> e) & 1:
                    raise ValidationError(f"set {set_id}: duplicate element {e}")
                mask |= 1 << e
            masks.append(mask)
        masks.extend([0] * (m - len(sets)))
        return cls(n, masks)

    @property
    def m(self) -> int:
        return len(self._incidence)

    @property
    def masks(self):
        return self._incidence.rows

    @property
    def incidence(self) -> BitMatrix:
        return self._incidence

    @property
    def universe_mask(self) -> int:
        return full_mask(self.n)

    def union_mask(self) -> int:
        union = 0
        for mask in self.masks:
            union |= mask
        return union

    def is_coverable(self) -> bool:
        """True when every element lies in at least one set."""
        return self.union_mask() == self.universe_mask

    def members(self, set_id: int) -> list:
        self._check_set_id(set_id)
        return to_indices(self.masks[set_id])

    def sizes(self) -> list:
        return self._incidence.row_counts()

    def element_memberships(self, element: int) -> list:
        """Set ids containing `element`."""
        if not 0 <= element < self.n:
            raise ValidationError(f"element {element} outside [0, {self.n})")
        return [i for i, mask in enumerate(self.masks) if (mask >> element) & 1]

    def _check_set_id(self, set_id):
        if not 0 <= set_id < self.m:
            raise ValidationError(f"set id {set_id} outside [0, {self.m})")

    def __eq__(self, other):
        return isinstance(other, SetSystem) and self.n == other.n and self.masks == other.masks

    def __hash__(self):
        return hash((self.n, self.masks))

    def __repr__(self):
        return f"SetSystem(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class CoverRequirement:
    """Covering requirement ρ ∈ (0, 1); the target is ⌈ρ·n⌉ elements."""

    rho: float

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValidationError("rho must be in (0, 1)")

    def target(self, n: int) -> int:
        # 1e-9 keeps e.g. 0.7 * 10 = 7.000000000000001 at 7
        return max(0, math.ceil(self.rho * n - 1e-9))

    @classmethod
    def coerce(cls, rho):
        return rho if isinstance(rho, cls) else cls(float(rho))


@dataclass(frozen=True)
class PartialCoverSolution:
    """
    Output (π, k) of the private greedy solver.

    The first k entries of the permutation are the chosen sets. `exhausted` is
    set when the threshold stage never fired and every set was taken.
    """

    permutation: tuple
    k: int
    coverage: int = 0
    exhausted: bool = False
    prefix_coverage: tuple = ()
    warnings: tuple = ()
    ledger: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.permutation)) != len(self.permutation):
            raise ValidationError("permutation entries must be distinct")
        if not 1 <= self.k <= len(self.permutation):
            raise ValidationError(f"k = {self.k} outside [1, {len(self.permutation)}]")

    @property
    def chosen(self) -> list:
        return list(self.permutation[: self.k])


def _chosen_mask(system: SetSystem, chosen) -> int:
    covered = 0
    for set_id in chosen:
        system._check_set_id(set_id)
        covered |= system.masks[set_id]
    return covered


def coverage_count(system: SetSystem, chosen) -> int:
    """|∪_{i ∈ chosen} S_i|; repeated ids are harmless."""
    return popcount(_chosen_mask(system, chosen))


def covered_mask(system: SetSystem, chosen) -> int:
    return _chosen_mask(system, chosen)


def marginal_gains(system: SetSystem, covered: int, remaining=None) -> list:
    """
    |S \\ covered| for every set in `remaining` (all sets when omitted).

    `covered` is an element bit-set; bits outside the universe are rejected.
    """
    if covered < 0 or covered > system.universe_mask:
        raise ValidationError("covered contains elements outside the universe")
    if remaining is not None:
        for set_id in remaining:
            system._check_set_id(set_id)
    return system.incidence.masked_counts(~covered & system.universe_mask, remaining)


def prefix_coverage(system: SetSystem, permutation) -> list:
    """f_i = |π_1 ∪ ... ∪ π_i| for i = 1..len(permutation); nondecreasing."""
    covered = 0
    out = []
    for set_id in permutation:
        system._check_set_id(set_id)
        covered |= system.masks[set_id]
        out.append(popcount(covered))
    return out


def neighbor_perturb(system: SetSystem, mode: str, element: int = None, member_sets=()) -> SetSystem:
    """
    Neighbouring instance obtained by removing or adding one universe element.

    mode="remove": element `element` disappears; higher element ids shift down
        by one so ids stay contiguous.
    mode="add": a fresh element (id n) joins exactly the sets in `member_sets`.

    Raises:
        ValidationError: removing an element that does not exist, unknown set id,
            or unknown mode.
    """
    if mode == REMOVE:
        if element is None or not 0 <= element < system.n:
            raise ValidationError(f"cannot remove element {element}: universe is [0, {system.n})")
        return SetSystem(system.n - 1, [drop_bit(mask, element) for mask in system.masks])
    if mode == ADD:
        member_sets = set(member_sets)
        for set_id in member_sets:
            system._check_set_id(set_id)
        fresh = 1 << system.n
        masks = [mask | fresh if i in member_sets else mask for i, mask in enumerate(system.masks)]
        return SetSystem(system.n + 1, masks)
    raise ValidationError(f"unknown perturbation mode {mode!r}; use 'add' or 'remove'")


__all__ = [
    "ADD",
    "REMOVE",
    "SetSystem",
    "CoverRequirement",
    "PartialCoverSolution",
    "coverage_count",
    "covered_mask",
    "marginal_gains",
    "prefix_coverage",
    "neighbor_perturb",
]
