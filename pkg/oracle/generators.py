"""
Instance generators.

- gen_star_lower_bound: two joined stars, the vertex-cover instance behind the
  impossibility of exact private partial cover
- gen_psc_to_vacc: Partial Set Cover -> MobileVaccClinic at radius 0
- gen_synthetic_mobility: clustered planar locations with biased visit-sets
- replicate_people: scale an instance by copying every person
- gen_random_set_system: Bernoulli incidence with every element covered
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ValidationError
from core.set_system import SetSystem
from core.vacc import Metric, VaccInstance
from oracle.exact import OracleResult, exact_partial_cover

logger = logging.getLogger(__name__)

STAR_RHO = 0.5
MAX_VISITS = 5
HOME_BIAS = 0.8


def gen_star_lower_bound(n: int, extra_edges: int = 0) -> SetSystem:
    """
    Vertex-cover set system of two stars S_{n/2} whose centers are joined.

    Vertices: u = 0, v = 1, u-leaves 2..n/2, v-leaves n/2+1..n-1.
    Edges (the universe), in order: (u, v), the u-spokes, the v-spokes, then
    `extra_edges` leaf-to-leaf edges pairing the i-th u-leaf with the i-th
    v-leaf (cycling, so parallel edges appear once the leaves run out).
    Set i holds the edges incident to vertex i.

    With ρ = 1/2 a single center covers n/2 = ⌈(n-1)/2⌉ edges, so opt = 1; three
    extra edges push the target past what either center covers alone.

    Raises:
        ValidationError: n odd or n < 4, or extra_edges < 0.
    """
    if n < 4 or n % 2:
        raise ValidationError("the star construction needs an even n >= 4")
    if extra_edges < 0:
        raise ValidationError("extra_edges must be non-negative")
    half = n // 2
    u_leaves = list(range(2, half + 1))
    v_leaves = list(range(half + 1, n))
    edges = [(0, 1)]
    edges += [(0, leaf) for leaf in u_leaves]
    edges += [(1, leaf) for leaf in v_leaves]
    for i in range(extra_edges):
        edges.append((u_leaves[i % len(u_leaves)], v_leaves[i % len(v_leaves)]))
    incident = [[] for _ in range(n)]
    for e, (a, b) in enumerate(edges):
        incident[a].append(e)
        incident[b].append(e)
    return SetSystem.from_sets(len(edges), incident)


def gen_random_set_system(n: int, m: int, density: float = 0.2, seed: int = 0) -> SetSystem:
    """
    Random coverable set system: element e joins set i with probability `density`;
    an element left in no set joins one uniformly chosen set.

    Raises:
        ValidationError: n < 1, m < 1 or density outside [0, 1].
    """
    if n < 1 or m < 1:
        raise ValidationError("n and m must be positive")
    if not 0 <= density <= 1:
        raise ValidationError("density must be in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    incidence = rng.random((m, n)) < density
    orphans = np.flatnonzero(~incidence.any(axis=0))
    incidence[rng.integers(m, size=orphans.size), orphans] = True
    return SetSystem.from_sets(n, [np.flatnonzero(row).tolist() for row in incidence])


def gen_psc_to_vacc(system: SetSystem, rho) -> VaccInstance:
    """
    MobileVaccClinic instance whose radius-0 solutions are partial set covers.

    Location i sits at point i on the line (one per set); element u becomes a
    person visiting {i : u ∈ S_i}. A facility set of size k has objective 0
    exactly when the matching sets cover ⌈ρn⌉ elements.

    Raises:
        ValidationError: an element belongs to no set, or m = 0.
    """
    if system.m < 1:
        raise ValidationError("the set system must contain at least one set")
    visits = []
    for u in range(system.n):
        member_of = system.element_memberships(u)
        if not member_of:
            raise ValidationError(f"element {u} belongs to no set")
        visits.append(member_of)
    metric = Metric.from_points(np.arange(system.m, dtype=float))
    return VaccInstance(visits, metric, k=1, rho=rho)


def gen_synthetic_mobility(people: int, locations: int, clusters: int, spread: float, seed: int = 0,
                           k: int = 1, rho=0.8) -> VaccInstance:
    """
    Clustered synthetic mobility data.

    Cluster centers are uniform in the unit square; location j belongs to cluster
    j mod c and sits at its center plus N(0, spread²) noise per axis. Each person
    has a home cluster and visits 1 to 5 distinct locations, each drawn from the
    home cluster with probability 0.8 and from all locations otherwise.

    When every location coincides the metric has diameter 0; two unvisited
    sentinel locations at distance 1 from each other are then appended so the
    instance still normalizes to unit diameter.

    Same arguments give the same instance.

    Raises:
        ValidationError: people, locations or clusters < 1, or spread < 0.
    """
    if people < 1 or locations < 1 or clusters < 1:
        raise ValidationError("people, locations and clusters must be positive")
    if spread < 0:
        raise ValidationError("spread must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = rng.random((clusters, 2))
    membership = np.arange(locations) % clusters
    points = centers[membership] + spread * rng.standard_normal((locations, 2))
    by_cluster = [np.flatnonzero(membership == c) for c in range(clusters)]
    populated = [c for c in range(clusters) if by_cluster[c].size]

    visits = []
    for _ in range(people):
        home = by_cluster[populated[rng.integers(len(populated))]]
        wanted = int(rng.integers(1, MAX_VISITS + 1))
        visit = set()
        for _ in range(wanted):
            pool = home if rng.random() < HOME_BIAS else np.arange(locations)
            visit.add(int(pool[rng.integers(pool.size)]))
        visits.append(sorted(visit))

    diff = points[:, None, :] - points[None, :, :]
    if not np.any(np.sqrt((diff ** 2).sum(axis=-1)) > 0):
        anchor = points[0]
        points = np.vstack([points, anchor + [-0.5, 0.0], anchor + [0.5, 0.0]])
        logger.debug("synthetic mobility: degenerate diameter, added two sentinel locations")
    return VaccInstance(visits, Metric.from_points(points), k=k, rho=rho)


def replicate_people(instance: VaccInstance, copies: int) -> VaccInstance:
    """Every person repeated `copies` times (labels get a '#c' suffix); metric unchanged."""
    if copies < 1:
        raise ValidationError("copies must be positive")
    visits = [visit for visit in instance.visits for _ in range(copies)]
    labels = [f"{label}#{c}" for label in instance.person_labels for c in range(copies)]
    return VaccInstance(
        visits,
        instance.metric,
        k=instance.k,
        rho=instance.rho,
        location_labels=instance.location_labels,
        person_labels=labels,
    )


@dataclass(frozen=True)
class StarDemo:
    """Exact optima of the star instance and of its neighbour with extra edges."""

    n: int
    extra_edges: int
    base: OracleResult
    neighbour: OracleResult

    @property
    def flipped(self) -> bool:
        return self.base.witness != self.neighbour.witness


def lower_bound_demo(n: int, extra_edges: int = 3, rho: float = STAR_RHO) -> StarDemo:
    """
    Solve the star instance and its `extra_edges` neighbour exactly.

    A few edges (people) change the exact optimum from one center to both
    centers, so any exact solver reveals their presence.
    """
    base = exact_partial_cover(gen_star_lower_bound(n), rho)
    neighbour = exact_partial_cover(gen_star_lower_bound(n, extra_edges), rho)
    logger.debug("star demo n=%d: base=%s neighbour=%s", n, base.witness, neighbour.witness)
    return StarDemo(n, extra_edges, base, neighbour)
