"""An explicit 56-state storage code built from a vector space partition.

The ambient space F_2^5 is split as a direct sum of a 3-coordinate block
carrying a copy of GF(8) and a 2-coordinate block carrying a fixed plane
inside it.  For every scalar b of GF(8) the graph of multiplication by b
on that plane is a 2-dimensional subspace, and the eight graphs together
with the field block partition the 31 nonzero vectors into 7 + 8 x 3.
Any two graphs meet trivially and any three span the whole space, so
every 3-subset of graphs is a repairing collection; each has exactly one
valid newcomer, again a graph, whose scalar label is a closed-form
function of the three labels.  The resulting 56 states form a
functional-repair code whose symmetry group has order 168, and eight is
the largest any such family of planes in F_2^5 can be.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .gf import GF, Field
from .groupsearch import GROUP_CAP, GroupClosure, LinearMap, group_closure
from .storage import CodeParams, RepairingCollection, StateSet
from .subspace import Subspace, full_space, span, standard_basis_vector, subspaces

__all__ = [
    "PartitionModel",
    "build_partition",
    "repair_label",
    "code_states",
    "partition_params",
    "canonical_seed_state",
    "label_action",
    "compose_semilinear",
    "semilinear_map",
    "enumerate_semilinear",
    "symmetry_group",
    "max_collection_size",
    "maximum_collections",
    "unique_maximum_collection",
]


def partition_params() -> CodeParams:
    """Code parameters realized by the partition construction."""
    return CodeParams(5, 4, 3, 3, 2, 1, 2)


@dataclass(frozen=True, eq=False)
class PartitionModel:
    """The fixed coordinates, the plane, and the eight graph spaces.

    Vectors are (w, u) pairs: the first three coordinates hold a GF(8)
    value w in the polynomial basis and the last two hold an element u
    of the plane in its own basis.  members[b] is the graph of
    multiplication by b, and labels inverts the assignment b -> member.
    """

    base: Field
    field8: Field
    m: int
    plane: tuple[int, ...]
    field_block: Subspace
    members: tuple[Subspace, ...]
    labels: dict[bytes, int]

    def vector_of(self, w: int, u: int) -> tuple[int, ...]:
        """Coordinates of the pair (w, u); u must lie on the plane."""
        self.field8._check(w)
        if u not in self.plane:
            raise ValueError(f"{u} is not on the plane")
        return tuple(self.field8.digits(w)) + tuple(self.field8.digits(u)[1:])

    def parts_of(self, vector: Sequence[int]) -> tuple[int, int]:
        """The (w, u) pair behind a coordinate vector."""
        if len(vector) != self.m:
            raise ValueError(f"vector length {len(vector)} does not match ambient {self.m}")
        w = self.field8.from_digits(list(vector[:3]))
        u = self.field8.from_digits([0] + list(vector[3:]))
        return w, u

    def member(self, label: int) -> Subspace:
        self.field8._check(label)
        return self.members[label]

    def label(self, space: Subspace) -> int:
        found = self.labels.get(space.key)
        if found is None:
            raise ValueError("subspace is not one of the graph spaces")
        return found


def _graph_space(base: Field, field8: Field, plane: Sequence[int], scalar: int) -> Subspace:
    rows = []
    for u in plane:
        if u == 0:
            continue
        w = field8.mul(scalar, u)
        row = tuple(field8.digits(w)) + tuple(field8.digits(u)[1:])
        rows.append(row)
    return span(base, 5, rows)


def build_partition() -> PartitionModel:
    """Construct the model and verify every claimed property exhaustively.

    The checks cover the shape of each member, the 7 + 8 x 3 partition
    of the nonzero vectors, trivial pairwise intersections, and the
    spanning of all 56 triples.  The construction is fully determined,
    so a failure here is an internal error, not bad input.
    """
    base = GF(2)
    field8 = GF(2, 3)
    alpha = field8.generator
    plane = (0, alpha, field8.mul(alpha, alpha),
             field8.add(alpha, field8.mul(alpha, alpha)))
    members = tuple(_graph_space(base, field8, plane, b) for b in field8.elements())
    field_block = span(base, 5, [standard_basis_vector(5, i) for i in range(3)])
    labels = {u.key: b for b, u in enumerate(members)}
    model = PartitionModel(base, field8, 5, plane, field_block, members, labels)

    assert model.members[0] == span(base, 5, [standard_basis_vector(5, 3),
                                              standard_basis_vector(5, 4)])
    assert field_block.dim == 3
    assert all(u.dim == 2 for u in members)
    assert len(labels) == 8
    covered = {tuple(v) for v in field_block.vectors() if any(v)}
    assert len(covered) == 7
    for u in members:
        part = {tuple(v) for v in u.vectors() if any(v)}
        assert len(part) == 3
        assert not covered & part
        covered |= part
    everything = {tuple(v) for v in full_space(base, 5).vectors() if any(v)}
    assert covered == everything
    for a, b in itertools.combinations(members, 2):
        assert (a & b).dim == 0
    for a, b, c in itertools.combinations(members, 3):
        assert (a + b + c).dim == 5
    return model


def repair_label(beta: int, gamma: int, delta: int) -> int:
    """The unique newcomer label for the collection with the given labels.

    The label is the square root of beta*gamma + beta*delta +
    gamma*delta, taken in GF(8) where squaring is a bijection and the
    root is the double Frobenius.  The result never coincides with any
    of the three inputs, which is what makes the newcomer a fresh
    member.
    """
    field8 = GF(2, 3)
    for x in (beta, gamma, delta):
        field8._check(x)
    if len({beta, gamma, delta}) != 3:
        raise ValueError(f"labels {beta}, {gamma}, {delta} must be distinct")
    total = field8.add(field8.add(field8.mul(beta, gamma), field8.mul(beta, delta)),
                       field8.mul(gamma, delta))
    label = field8.frobenius(total, 2)
    assert label not in (beta, gamma, delta)
    return label


def code_states(model: Optional[PartitionModel] = None) -> StateSet:
    """All 56 states of the code, verified with their unique newcomers.

    Every 3-subset of the graph spaces is one collection; verification
    computes all valid newcomers per collection and asserts the only one
    is the graph with the closed-form label.
    """
    if model is None:
        model = build_partition()
    params = partition_params()
    collections = [RepairingCollection([model.members[b], model.members[g],
                                        model.members[d]])
                   for b, g, d in itertools.combinations(range(8), 3)]
    states = StateSet(params, collections)
    report = states.verify(all_newcomers=True)
    assert report.ok
    for b, g, d in itertools.combinations(range(8), 3):
        key = RepairingCollection([model.members[b], model.members[g],
                                   model.members[d]]).key
        expected = model.members[repair_label(b, g, d)]
        assert states.transitions[key] == (expected,)
    return states


def canonical_seed_state(model: Optional[PartitionModel] = None,
                         ) -> tuple[RepairingCollection, Subspace]:
    """The seed state used by searches: labels 0, 1, alpha and their newcomer."""
    if model is None:
        model = build_partition()
    alpha = model.field8.generator
    collection = RepairingCollection([model.members[0], model.members[1],
                                      model.members[alpha]])
    return collection, model.members[repair_label(0, 1, alpha)]


def label_action(a: int, b: int, i: int, beta: int) -> int:
    """Image of a label under the map x -> a * x^(2^i) + b."""
    field8 = GF(2, 3)
    for x in (a, b, beta):
        field8._check(x)
    if a == 0:
        raise ValueError("the scale must be nonzero")
    return field8.add(field8.mul(a, field8.frobenius(beta, i % 3)), b)


def compose_semilinear(outer: tuple[int, int, int],
                       inner: tuple[int, int, int]) -> tuple[int, int, int]:
    """Parameters of the composite map: inner first, then outer.

    Substituting a*x^(2^i) + b into c*x^(2^j) + d gives the scale
    c * a^(2^j), the shift c * b^(2^j) + d, and the twist i + j mod 3.
    """
    field8 = GF(2, 3)
    c, d, j = outer
    a, b, i = inner
    for x in (a, b, c, d):
        field8._check(x)
    if a == 0 or c == 0:
        raise ValueError("the scale must be nonzero")
    scale = field8.mul(c, field8.frobenius(a, j % 3))
    shift = field8.add(field8.mul(c, field8.frobenius(b, j % 3)), d)
    return scale, shift, (i + j) % 3


def semilinear_map(a: int, b: int, i: int,
                   model: Optional[PartitionModel] = None) -> LinearMap:
    """The invertible map (w, u) -> (a*w^(2^i) + b*u^(2^i), u^(2^i)).

    Frobenius twists are GF(2)-linear and the plane is closed under
    them, so the map is a 5x5 matrix over GF(2) in the fixed
    coordinates.  It carries the graph of multiplication by x to the
    graph of multiplication by a*x^(2^i) + b.
    """
    if model is None:
        model = build_partition()
    field8 = model.field8
    field8._check(a)
    field8._check(b)
    if a == 0:
        raise ValueError("the scale must be nonzero")
    i = i % 3
    rows = []
    for j in range(3):
        w = field8.from_digits([1 if t == j else 0 for t in range(3)])
        image_w = field8.mul(a, field8.frobenius(w, i))
        rows.append(model.vector_of(image_w, 0))
    for u in model.plane[1:3]:
        twisted = field8.frobenius(u, i)
        rows.append(model.vector_of(field8.mul(b, twisted), twisted))
    return LinearMap(model.base, model.m, tuple(rows))


def enumerate_semilinear(model: Optional[PartitionModel] = None,
                         ) -> tuple[tuple[tuple[int, int, int], LinearMap], ...]:
    """All 168 parameterized maps, as (parameters, map) pairs."""
    if model is None:
        model = build_partition()
    out = []
    for a in model.field8.nonzero():
        for b in model.field8.elements():
            for i in range(3):
                out.append(((a, b, i), semilinear_map(a, b, i, model)))
    return tuple(out)


def symmetry_group(model: Optional[PartitionModel] = None,
                   cap: int = GROUP_CAP) -> GroupClosure:
    """The full symmetry group, generated by scaling, shift and Frobenius."""
    if model is None:
        model = build_partition()
    alpha = model.field8.generator
    generators = [semilinear_map(alpha, 0, 0, model),
                  semilinear_map(1, 1, 0, model),
                  semilinear_map(1, 0, 1, model)]
    return group_closure(generators, cap=cap)


def _packed_vectors(space: Subspace) -> list[int]:
    out = []
    for v in space.vectors():
        packed = 0
        for j, x in enumerate(v):
            if x:
                packed |= 1 << j
        out.append(packed)
    return out


def _clique_search(model: PartitionModel, collect_all: bool,
                   ) -> tuple[int, list[tuple[int, ...]]]:
    # maximum families of planes with trivial pairwise intersections and
    # all triples spanning, by branch and bound over the 155 planes in
    # canonical key order; vectors are packed so that a plane is a bit
    # mask and a pair's span is the xor set of their vectors
    planes = list(subspaces(model.base, model.m, 2))
    packed = [_packed_vectors(u) for u in planes]
    masks = []
    for vecs in packed:
        mask = 0
        for v in vecs:
            if v:
                mask |= 1 << v
        masks.append(mask)
    count = len(planes)
    pair_mask: dict[tuple[int, int], int] = {}
    for x in range(count):
        for y in range(x + 1, count):
            if masks[x] & masks[y]:
                continue
            mask = 0
            for vx in packed[x]:
                for vy in packed[y]:
                    if vx ^ vy:
                        mask |= 1 << (vx ^ vy)
            pair_mask[(x, y)] = mask

    best_size = 0
    witnesses: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def extend(candidates: list[int]) -> None:
        nonlocal best_size, witnesses
        size = len(chosen)
        if size > best_size:
            best_size = size
            witnesses = [tuple(chosen)]
        elif collect_all and size == best_size and size > 0:
            witnesses.append(tuple(chosen))
        if size + len(candidates) < best_size:
            return
        if not collect_all and size + len(candidates) == best_size:
            return
        for idx, c in enumerate(candidates):
            # adding c introduces the pairs (x, c); a later plane stays
            # viable if it avoids c and escapes the span of each new pair
            narrowed = []
            for d in candidates[idx + 1:]:
                if masks[c] & masks[d]:
                    continue
                for x in chosen:
                    key = (x, c) if x < c else (c, x)
                    if not masks[d] & ~pair_mask[key]:
                        break
                else:
                    narrowed.append(d)
            chosen.append(c)
            extend(narrowed)
            chosen.pop()

    extend(list(range(count)))
    keyed = [tuple(planes[x].key for x in w) for w in witnesses
             if len(w) == best_size]
    return best_size, keyed


def max_collection_size(model: Optional[PartitionModel] = None) -> int:
    """Largest family of planes that pairwise meet trivially and triple-span.

    Runs the exhaustive branch-and-bound over all 155 planes of F_2^5
    and confirms the eight graph spaces attain the maximum before
    returning it.
    """
    if model is None:
        model = build_partition()
    for a, b in itertools.combinations(model.members, 2):
        assert (a & b).dim == 0
    for a, b, c in itertools.combinations(model.members, 3):
        assert (a + b + c).dim == 5
    best, _ = _clique_search(model, collect_all=False)
    assert best >= len(model.members)
    return best


def maximum_collections(model: Optional[PartitionModel] = None,
                        ) -> tuple[tuple[bytes, ...], ...]:
    """Every maximum family, as sorted tuples of subspace keys."""
    if model is None:
        model = build_partition()
    _, keyed = _clique_search(model, collect_all=True)
    return tuple(sorted(tuple(sorted(w)) for w in keyed))


def _general_linear_generators(model: PartitionModel) -> list[LinearMap]:
    m = model.m
    cycle = tuple(standard_basis_vector(m, (i + 1) % m) for i in range(m))
    shear_rows = [list(standard_basis_vector(m, i)) for i in range(m)]
    shear_rows[0][1] = 1
    shear = tuple(tuple(r) for r in shear_rows)
    return [LinearMap(model.base, m, cycle), LinearMap(model.base, m, shear)]


def unique_maximum_collection(model: Optional[PartitionModel] = None,
                              orbit_cap: int = 10**5,
                              witnesses: Optional[Sequence[tuple[bytes, ...]]] = None,
                              ) -> bool:
    """Whether all maximum families are images of the graph family.

    Compares the exhaustive count of maximum families against the orbit
    of the canonical one under the invertible maps of F_2^5; equality
    means every maximum family is linearly equivalent to the graphs.
    Without a precomputed witness list this rebuilds it, which is
    noticeably slower than max_collection_size.
    """
    if model is None:
        model = build_partition()
    if witnesses is None:
        witnesses = maximum_collections(model)
    found = set(witnesses)
    generators = _general_linear_generators(model)
    canonical = tuple(sorted(u.key for u in model.members))
    orbit = {canonical}
    frontier = [tuple(model.members)]
    while frontier:
        family = frontier.pop()
        for g in generators:
            image = tuple(g.apply(u) for u in family)
            signature = tuple(sorted(u.key for u in image))
            if signature not in orbit:
                if len(orbit) >= orbit_cap:
                    raise RuntimeError(f"orbit exceeded {orbit_cap} families")
                orbit.add(signature)
                frontier.append(image)
    return orbit == found
