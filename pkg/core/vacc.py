from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from core.bitset import from_bools
from core.errors import ValidationError
from core.set_system import CoverRequirement, SetSystem

DIAMETER_TOLERANCE = 1e-9


class Metric:
    """
    Finite metric on the location set, normalized to unit diameter.

    Two constructions are supported: points on the line / in the plane
    (Euclidean, triangle inequality by construction) and an explicit symmetric
    matrix (checked on ingestion). Distances are divided by the diameter and the
    divisor is kept in `scale`, so `to_original(x)` reports a normalized value in
    input units. A metric whose diameter is 0 (one location, or all locations
    coincide) keeps scale 1.

    Attributes:
        distances (numpy.ndarray): Read-only L x L normalized distance matrix.
        scale (float): Original-unit length of the normalized unit.
        points (numpy.ndarray or None): Original coordinates for point metrics.
    """

    def __init__(self, distances, scale: float = 1.0, points=None):
        distances = np.array(distances, dtype=float)
        distances.setflags(write=False)
        self.distances = distances
        self.scale = float(scale)
        if points is not None:
            points = np.array(points, dtype=float)
            points.setflags(write=False)
        self.points = points

    @classmethod
    def from_points(cls, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[1] not in (1, 2):
            raise ValidationError("points must be 1-D or 2-D coordinates")
        if not np.all(np.isfinite(points)):
            raise ValidationError("point coordinates must be finite")
        diff = points[:, None, :] - points[None, :, :]
        raw = np.sqrt((diff ** 2).sum(axis=-1))
        diameter = float(raw.max()) if raw.size else 0.0
        scale = diameter if diameter > 0 else 1.0
        return cls(raw / scale, scale=scale, points=points)

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-9):
        """
        Validate and normalize an explicit distance matrix.

        Raises:
            ValidationError: not square, negative or non-finite entries, non-zero
                diagonal, asymmetry or a triangle-inequality violation.
        """
        raw = np.asarray(matrix, dtype=float)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise ValidationError("distance matrix must be square")
        if not np.all(np.isfinite(raw)) or np.any(raw < 0):
            raise ValidationError("distances must be finite and non-negative")
        if np.any(np.abs(np.diag(raw)) > tol):
            raise ValidationError("distance matrix must have a zero diagonal")
        if not np.allclose(raw, raw.T, atol=tol, rtol=0.0):
            raise ValidationError("distance matrix must be symmetric")
        for j in range(raw.shape[0]):
            # d(i, k) <= d(i, j) + d(j, k) for every i, k through pivot j
            slack = raw[:, j][:, None] + raw[j, :][None, :] - raw
            if np.any(slack < -tol * max(1.0, float(raw.max()))):
                i, k = np.argwhere(slack < -tol * max(1.0, float(raw.max())))[0]
                raise ValidationError(f"triangle inequality violated for ({i}, {j}, {k})")
        diameter = float(raw.max()) if raw.size else 0.0
        scale = diameter if diameter > 0 else 1.0
        return cls(raw / scale, scale=scale)

    @property
    def size(self) -> int:
        return self.distances.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.distances.max()) if self.distances.size else 0.0

    def distance(self, i: int, j: int) -> float:
        return float(self.distances[i, j])

    def to_original(self, value: float) -> float:
        return value * self.scale

    def original_distances(self):
        return self.distances * self.scale


class VaccInstance:
    """
    MobileVaccClinic instance with outliers.

    Locations C are public; people P with their visit-sets S_p ⊆ C are the
    private data. Each person's service cost for a facility set F is
    d(S_p, F) = min_{l ∈ S_p, f ∈ F} d(l, f). The goal is to open at most k
    facilities minimizing the ⌈ρ·|P|⌉-th smallest service cost.

    Args:
        visits (sequence of sequences of int): Visit-set per person, location indices.
        metric (Metric): Normalized metric over the locations.
        k (int): Facility budget. Default 1.
        rho (float or CoverRequirement): Covering requirement. Default 0.8.
        location_labels / person_labels (sequence of str, optional): Labels from
            the input file; default to the indices.

    Raises:
        ValidationError: empty visit-set, unknown location, k < 1, or a metric whose
            diameter is neither 1 nor 0 (degenerate).
    """

    def __init__(self, visits, metric: Metric, k: int = 1, rho=0.8, location_labels=None, person_labels=None):
        if k < 1:
            raise ValidationError("k must be a positive integer")
        n_locations = metric.size
        clean = []
        for p, visit in enumerate(visits):
            visit = tuple(sorted(set(int(v) for v in visit)))
            if not visit:
                raise ValidationError(f"person {p} has an empty visit-set")
            if visit[0] < 0 or visit[-1] >= n_locations:
                raise ValidationError(f"person {p} visits a location outside [0, {n_locations})")
            clean.append(visit)
        diameter = metric.diameter
        if diameter > DIAMETER_TOLERANCE and abs(diameter - 1.0) > DIAMETER_TOLERANCE:
            raise ValidationError(f"metric diameter is {diameter}, expected 1 after normalization")
        self.visits = tuple(clean)
        self.metric = metric
        self.k = int(k)
        self.rho = CoverRequirement.coerce(rho)
        self.location_labels = tuple(location_labels) if location_labels is not None else tuple(
            str(i) for i in range(n_locations)
        )
        self.person_labels = tuple(person_labels) if person_labels is not None else tuple(
            str(p) for p in range(len(clean))
        )
        if len(self.location_labels) != n_locations:
            raise ValidationError("one label per location required")
        if len(self.person_labels) != len(clean):
            raise ValidationError("one label per person required")

    @property
    def n_people(self) -> int:
        return len(self.visits)

    @property
    def n_locations(self) -> int:
        return self.metric.size

    @cached_property
    def service_costs(self):
        """P x L matrix whose (p, j) entry is d(S_p, j); read-only."""
        d = self.metric.distances
        costs = np.empty((self.n_people, self.n_locations))
        for p, visit in enumerate(self.visits):
            costs[p] = d[list(visit)].min(axis=0)
        costs.setflags(write=False)
        return costs

    def with_params(self, k: int = None, rho=None):
        """Same people and metric with a different budget or covering requirement."""
        return VaccInstance(
            self.visits,
            self.metric,
            k=self.k if k is None else k,
            rho=self.rho if rho is None else rho,
            location_labels=self.location_labels,
            person_labels=self.person_labels,
        )

    def __repr__(self):
        return f"VaccInstance(people={self.n_people}, locations={self.n_locations}, k={self.k}, rho={self.rho.rho})"


@dataclass(frozen=True)
class RoundTrace:
    """One radius guess of the client-cover binary search."""

    radius: float
    facilities: tuple
    accepted: bool
    exhausted: bool = False


@dataclass(frozen=True)
class FacilitySolution:
    """
    Facilities F ⊆ C returned by a client-cover solver.

    `radius` is the (privately selected) radius of the accepted round,
    `achieved_radius` the ρ-percentile service cost of F measured on the data,
    both in normalized units.
    """

    facilities: tuple
    achieved_radius: float
    budget_multiplier_used: float
    radius: float = 0.0
    rounds: tuple = ()
    ledger: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.facilities:
            raise ValidationError("a facility solution must open at least one facility")


def service_costs(instance: VaccInstance):
    return instance.service_costs


def build_radius_sets(instance: VaccInstance, radius: float) -> SetSystem:
    """
    Partial Set Cover instance at radius R.

    Universe = people; one set per location j, S_j(R) = {p : d(S_p, j) <= R}.
    """
    if not 0 <= radius <= 1:
        raise ValueError("radius must lie in [0, 1]")
    within = instance.service_costs <= radius
    return SetSystem(instance.n_people, [from_bools(within[:, j]) for j in range(instance.n_locations)])


def person_costs(instance: VaccInstance, facilities) -> np.ndarray:
    facilities = list(facilities)
    if not facilities:
        raise ValidationError("facility set must be nonempty")
    for j in facilities:
        if not 0 <= j < instance.n_locations:
            raise ValidationError(f"facility {j} outside [0, {instance.n_locations})")
    return instance.service_costs[:, facilities].min(axis=1)


def objective_percentile(instance: VaccInstance, facilities, rho=None) -> float:
    """
    ⌈ρn⌉-th smallest service cost d(S_p, F) (1-based), in normalized units.

    Raises:
        ValidationError: empty facility set.
    """
    rho = instance.rho if rho is None else CoverRequirement.coerce(rho)
    costs = person_costs(instance, facilities)
    if costs.size == 0:
        return 0.0
    target = max(1, rho.target(costs.size))
    return float(np.partition(costs, target - 1)[target - 1])
