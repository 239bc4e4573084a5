"""Storage codes generated by linear symmetries of a single state.

A repairing collection whose repaired variants are all linear images of
itself generates a code for free: if a group of invertible maps contains,
for every member, a map carrying the collection onto the variant with
that member replaced, then the orbit of the collection under the group
is closed under repair.  This module finds such transition maps by
constrained backtracking, generates groups of maps by breadth-first
closure, builds orbits, and verifies the resulting state sets rather
than trusting the construction.

Searches are exact but bounded: the backtracking node count, the group
order, and the orbit size each have a cap, and hitting one is reported
explicitly instead of silently truncating the result.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .gf import Field
from .storage import CodeParams, RepairingCollection, StateSet
from .subspace import (
    CapExceeded,
    Subspace,
    express,
    invert_matrix,
    matmul,
    rank_of,
    span,
    standard_basis_vector,
)

__all__ = [
    "BACKTRACK_CAP",
    "GROUP_CAP",
    "ORBIT_CAP",
    "LinearMap",
    "GroupClosure",
    "OrbitVerificationError",
    "SearchResult",
    "SearchOutcome",
    "transition_maps",
    "transition_maps_exhaustive",
    "stabilizer",
    "group_closure",
    "orbit_code",
    "symmetry_search",
]

BACKTRACK_CAP = 10**7
GROUP_CAP = 10**6
ORBIT_CAP = 10**5


def _fingerprint(key: bytes) -> str:
    return hashlib.sha256(key).hexdigest()[:12]


@dataclass(frozen=True)
class LinearMap:
    """An invertible linear map of F_q^m, acting on row vectors.

    The matrix is stored as rows; a vector v maps to v times the matrix,
    and a subspace maps to the span of its basis images.  Maps are
    hashable and compare by matrix entries, so they can live in sets and
    serve as group elements.
    """

    field: Field
    m: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.m or any(len(r) != self.m for r in rows):
            raise ValueError(f"matrix must be {self.m}x{self.m}")
        for r in rows:
            for a in r:
                self.field._check(a)
        if rank_of(self.field, self.m, rows) != self.m:
            raise ValueError("matrix is singular")

    @classmethod
    def identity(cls, field: Field, m: int) -> "LinearMap":
        return cls(field, m, tuple(standard_basis_vector(m, i) for i in range(m)))

    @property
    def key(self) -> bytes:
        if self.field.q <= 256:
            return bytes(a for row in self.rows for a in row)
        return b",".join(str(a).encode() for row in self.rows for a in row)

    def apply_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.m:
            raise ValueError(f"vector length {len(v)} does not match ambient {self.m}")
        return matmul(self.field, [v], self.rows)[0]

    def apply(self, space: Subspace) -> Subspace:
        if space.field != self.field:
            raise ValueError("subspace is over a different field")
        if space.m != self.m:
            raise ValueError(f"subspace ambient {space.m} does not match map ambient {self.m}")
        return span(self.field, self.m, matmul(self.field, space.rows, self.rows))

    def apply_collection(self, collection: RepairingCollection) -> RepairingCollection:
        return RepairingCollection([self.apply(u) for u in collection.spaces])

    def compose(self, other: "LinearMap") -> "LinearMap":
        """The map applying other first, then this one."""
        if other.field != self.field or other.m != self.m:
            raise ValueError("maps act on different spaces")
        return LinearMap(self.field, self.m, matmul(self.field, other.rows, self.rows))

    def inverse(self) -> "LinearMap":
        return LinearMap(self.field, self.m, invert_matrix(self.field, self.rows))

    def __repr__(self) -> str:
        return f"<LinearMap {_fingerprint(self.key)} on F_{self.field.q}^{self.m}>"


class GroupClosure:
    """A set of linear maps generated from the given generators.

    When complete, the elements form the full group and order reports
    its cardinality.  When the closure stopped at the cap, complete is
    False, found gives the partial count, and order refuses to answer
    so a truncated search can never pass for a finished one.
    """

    def __init__(self, generators: Sequence[LinearMap],
                 elements: dict[bytes, LinearMap], complete: bool, cap: int,
                 transitive: Optional[bool] = None):
        if not generators:
            raise ValueError("a group needs at least one generator")
        self.field = generators[0].field
        self.m = generators[0].m
        self.generators = tuple(generators)
        self.elements = dict(elements)
        self.complete = complete
        self.cap = cap
        self.transitive = transitive

    @property
    def order(self) -> int:
        if not self.complete:
            raise ValueError(f"group order exceeds cap {self.cap}; closure is incomplete")
        return len(self.elements)

    @property
    def found(self) -> int:
        return len(self.elements)

    def describe(self) -> str:
        if self.complete:
            return f"group of order {len(self.elements)}"
        return f"group order exceeds {self.cap} (search incomplete, {len(self.elements)} found)"

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[LinearMap]:
        for key in sorted(self.elements):
            yield self.elements[key]

    def __contains__(self, item: object) -> bool:
        if isinstance(item, LinearMap):
            return item.key in self.elements
        if isinstance(item, bytes):
            return item in self.elements
        return False

    def __repr__(self) -> str:
        return f"<GroupClosure {self.describe()}>"


class OrbitVerificationError(RuntimeError):
    """The orbit of a seed collection failed the repair property.

    Orbits are admissible only under hypotheses on the seed state and
    its maps; a failure is evidence those hypotheses do not hold for the
    given input, and the report names the failing collections.
    """


def _assignments(sources: Sequence[Subspace],
                 targets: Sequence[Subspace]) -> Iterator[tuple[Subspace, ...]]:
    # distinct dimension-compatible bijections source position -> target,
    # deduplicated by the assigned target key tuple (targets can repeat)
    seen = set()
    for perm in itertools.permutations(range(len(targets))):
        if any(sources[i].dim != targets[j].dim for i, j in enumerate(perm)):
            continue
        sig = tuple(targets[j].key for j in perm)
        if sig in seen:
            continue
        seen.add(sig)
        yield tuple(targets[j] for j in perm)


def _constrained_images(field: Field, m: int, pairs: Sequence[tuple[Subspace, Subspace]],
                        cap: int, counter: list[int]) -> Iterator[tuple[tuple, tuple]]:
    """Backtrack over images of an adapted basis, one pair constraint at a time.

    Yields (source_rows, image_rows) with both sides independent bases
    of F_q^m such that every basis row of each source subspace maps into
    its paired target.  Dependent source rows have forced images and
    only prune; independent rows branch over target vectors that keep
    the images independent.  Unconstrained directions are filled from
    standard basis vectors with free images.  counter[0] accumulates
    candidate nodes and is checked against cap.
    """
    constraint_rows: list[tuple[tuple[int, ...], Optional[Subspace]]] = []
    for source, target in pairs:
        for v in source.rows:
            constraint_rows.append((v, target))
    for i in range(m):
        constraint_rows.append((standard_basis_vector(m, i), None))

    src: list[tuple[int, ...]] = []
    img: list[tuple[int, ...]] = []

    def extend(pos: int) -> Iterator[tuple[tuple, tuple]]:
        if pos == len(constraint_rows):
            # the standard basis tail guarantees a spanning source side
            if len(src) == m:
                yield tuple(src), tuple(img)
            return
        v, target = constraint_rows[pos]
        coeffs = express(field, v, src)
        if coeffs is not None:
            if target is not None:
                forced = tuple(matmul(field, [coeffs], img)[0]) if any(coeffs) else (0,) * m
                if forced not in target:
                    return
            yield from extend(pos + 1)
            return
        candidates = target.vectors() if target is not None else full_vectors()
        for w in candidates:
            counter[0] += 1
            if counter[0] > cap:
                raise CapExceeded(f"map search exceeded {cap} nodes")
            if express(field, w, img) is not None:
                continue
            src.append(tuple(v))
            img.append(tuple(w))
            yield from extend(pos + 1)
            src.pop()
            img.pop()

    def full_vectors() -> Iterator[tuple[int, ...]]:
        return span(field, m, [standard_basis_vector(m, i) for i in range(m)]).vectors()

    yield from extend(0)


def _search_maps(field: Field, m: int,
                 sources: Sequence[Subspace],
                 assignment_iter: Iterator[tuple[Subspace, ...]],
                 cap: int) -> list[LinearMap]:
    counter = [0]
    found: dict[bytes, LinearMap] = {}
    for targets in assignment_iter:
        pairs = list(zip(sources, targets))
        for src_rows, img_rows in _constrained_images(field, m, pairs, cap, counter):
            matrix = matmul(field, invert_matrix(field, src_rows), img_rows)
            mapping = LinearMap(field, m, matrix)
            found.setdefault(mapping.key, mapping)
    return [found[k] for k in sorted(found)]


def transition_maps(collection: RepairingCollection, newcomer: Subspace,
                    index: int, cap: int = BACKTRACK_CAP) -> tuple[LinearMap, ...]:
    """All invertible maps carrying the collection onto a repaired variant.

    The variant replaces the member at index (into the sorted member
    tuple) by the newcomer.  A map qualifies when the multiset of member
    images equals the variant's members exactly.  The search runs over
    dimension-compatible member bijections and then backtracking over
    basis images inside the assigned targets; the result is
    deduplicated and sorted by matrix key.  Raises CapExceeded past cap
    backtracking nodes.
    """
    field = collection.field
    m = collection.m
    variant = collection.replace(index, newcomer)
    sources = collection.spaces
    maps = _search_maps(field, m, sources,
                        _assignments(sources, variant.spaces), cap)
    target_keys = tuple(u.key for u in variant.spaces)
    for mapping in maps:
        image_keys = tuple(sorted(mapping.apply(u).key for u in sources))
        assert image_keys == target_keys
    return tuple(maps)


def transition_maps_exhaustive(collection: RepairingCollection, newcomer: Subspace,
                               index: int, cap: int = BACKTRACK_CAP) -> tuple[LinearMap, ...]:
    """Scan of the full general linear group, as an oracle for small cases.

    Enumerates every invertible matrix over GF(2) in ambient dimension
    at most five and keeps those satisfying the same multiset equation
    as transition_maps.  Counts matrices against cap.
    """
    field = collection.field
    m = collection.m
    if field.q != 2 or m > 5:
        raise ValueError("exhaustive scan is limited to GF(2) and ambient dimension <= 5")
    variant = collection.replace(index, newcomer)
    target_keys = tuple(u.key for u in variant.spaces)
    counter = [0]
    found: dict[bytes, LinearMap] = {}
    all_vectors = list(span(field, m, [standard_basis_vector(m, i)
                                       for i in range(m)]).vectors())

    rows: list[tuple[int, ...]] = []

    def build() -> None:
        if len(rows) == m:
            counter[0] += 1
            if counter[0] > cap:
                raise CapExceeded(f"exhaustive scan exceeded {cap} matrices")
            mapping = LinearMap(field, m, tuple(rows))
            image_keys = tuple(sorted(mapping.apply(u).key for u in collection.spaces))
            if image_keys == target_keys:
                found.setdefault(mapping.key, mapping)
            return
        for v in all_vectors:
            if express(field, v, rows) is not None:
                continue
            rows.append(tuple(v))
            build()
            rows.pop()

    build()
    return tuple(found[k] for k in sorted(found))


def _orbit_of_first_member(maps: Sequence[LinearMap],
                           collection: RepairingCollection) -> bool:
    # does the permutation action of the maps reach every member key
    # from the first one
    by_key = {u.key: u for u in collection.spaces}
    keys = set(by_key)
    first = collection.spaces[0].key
    orbit = {first}
    frontier = [first]
    while frontier:
        key = frontier.pop()
        for mapping in maps:
            image = mapping.apply(by_key[key]).key
            if image in keys and image not in orbit:
                orbit.add(image)
                frontier.append(image)
    return orbit == keys


def stabilizer(collection: RepairingCollection, newcomer: Subspace,
               cap: int = BACKTRACK_CAP) -> GroupClosure:
    """All invertible maps fixing the collection setwise and the newcomer.

    The result is a full group (the set of such maps is closed under
    composition and inverse), reported as a complete GroupClosure whose
    transitive flag records whether the induced permutation action
    reaches every member of the collection from the first one.
    """
    field = collection.field
    m = collection.m
    if newcomer.field != field or newcomer.m != m:
        raise ValueError("newcomer does not live in the collection's ambient space")
    sources = tuple(collection.spaces) + (newcomer,)

    def assignments() -> Iterator[tuple[Subspace, ...]]:
        for member_targets in _assignments(collection.spaces, collection.spaces):
            yield member_targets + (newcomer,)

    maps = _search_maps(field, m, sources, assignments(), cap)
    for mapping in maps:
        image_keys = tuple(sorted(mapping.apply(u).key for u in collection.spaces))
        assert image_keys == tuple(u.key for u in collection.spaces)
        assert mapping.apply(newcomer) == newcomer
    elements = {mapping.key: mapping for mapping in maps}
    transitive = _orbit_of_first_member(maps, collection)
    return GroupClosure(maps, elements, complete=True, cap=cap, transitive=transitive)


def group_closure(generators: Sequence[LinearMap], cap: int = GROUP_CAP) -> GroupClosure:
    """Breadth-first closure of the generators under composition.

    Starts from the identity and right-composes with each generator
    until no new elements appear; the generators are invertible and the
    caps keep everything finite, so the complete closure is the full
    generated group.  Stopping at cap returns an incomplete closure
    whose order property refuses to answer.
    """
    if not generators:
        raise ValueError("a group needs at least one generator")
    field = generators[0].field
    m = generators[0].m
    for g in generators:
        if g.field != field or g.m != m:
            raise ValueError("generators act on different spaces")
    identity = LinearMap.identity(field, m)
    elements = {identity.key: identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for g in generators:
            product = g.compose(current)
            if product.key not in elements:
                if len(elements) >= cap:
                    return GroupClosure(generators, elements, complete=False, cap=cap)
                elements[product.key] = product
                queue.append(product)
    return GroupClosure(generators, elements, complete=True, cap=cap)


def orbit_code(group: GroupClosure, seed: RepairingCollection,
               params: CodeParams, cap: int = ORBIT_CAP) -> StateSet:
    """The orbit of the seed collection under the group, verified.

    Applies every group element to the seed, deduplicates by collection
    key, and runs the full repair-property check on the resulting state
    set.  A verification failure raises OrbitVerificationError carrying
    the report: the orbit construction only yields admissible sets under
    hypotheses on the seed, so a failure indicts the input, and nothing
    unverified is ever returned.
    """
    if not group.complete:
        raise ValueError("cannot take the orbit of an incomplete group closure")
    orbit: dict[bytes, RepairingCollection] = {}
    for g in group:
        image = g.apply_collection(seed)
        if image.key not in orbit:
            if len(orbit) >= cap:
                raise CapExceeded(f"orbit exceeded {cap} collections")
            orbit[image.key] = image
    states = StateSet(params, orbit.values())
    assert len(states) <= group.order
    assert seed in states
    report = states.verify()
    if not report.ok:
        raise OrbitVerificationError(
            "orbit fails the repair property; the seed state does not meet "
            "the hypotheses:\n" + report.render())
    return states


@dataclass(frozen=True, eq=False)
class SearchResult:
    """One verified code found by symmetry_search."""

    transition: LinearMap
    group: GroupClosure
    states: StateSet


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    """Everything a symmetry search saw: stabilizer, candidates, successes.

    candidate_classes groups the raw candidate maps per index modulo
    composition with stabilizer elements: maps in one class carry the
    collection to the variant along the same coset and the class count
    is the natural size of the candidate list.
    """

    stabilizer: GroupClosure
    transitive_generators: tuple[LinearMap, ...]
    candidates: tuple[tuple[int, LinearMap], ...]
    candidate_classes: tuple[tuple[int, tuple[LinearMap, ...]], ...]
    results: tuple[SearchResult, ...]
    log: tuple[str, ...]

    def render(self) -> str:
        return "\n".join(self.log)


def _cyclic_transitive_generators(stab: GroupClosure,
                                  collection: RepairingCollection) -> tuple[LinearMap, ...]:
    # one representative generator per distinct transitive cyclic
    # subgroup of the stabilizer, smallest subgroups first
    subgroups: dict[frozenset, tuple[int, LinearMap]] = {}
    for g in stab:
        if not _orbit_of_first_member([g], collection):
            continue
        power = g
        members = {g.key}
        while True:
            power = power.compose(g)
            if power.key in members:
                break
            members.add(power.key)
        signature = frozenset(members)
        best = subgroups.get(signature)
        if best is None or g.key < best[1].key:
            subgroups[signature] = (len(members), g)
    ranked = sorted(subgroups.values(), key=lambda item: (item[0], item[1].key))
    return tuple(g for _, g in ranked)


def symmetry_search(collection: RepairingCollection, newcomer: Subspace,
                    params: CodeParams, *, backtrack_cap: int = BACKTRACK_CAP,
                    group_cap: int = GROUP_CAP,
                    orbit_cap: int = ORBIT_CAP) -> SearchOutcome:
    """Search for small group-generated codes seeded at one repair state.

    Computes the stabilizer of (collection, newcomer); when its action
    on the members is transitive a single transition map suffices, so
    only replacements of the first member are tried, otherwise every
    index is.  Each candidate map is tried alone and together with each
    transitive cyclic stabilizer subgroup; every complete group closure
    gets its orbit built and verified, and the verified codes are
    returned sorted by state count, then group order.  Closures that
    hit group_cap are logged and skipped, so callers should size the
    caps to the instance they search.
    """
    stab = stabilizer(collection, newcomer, cap=backtrack_cap)
    transitive_gens = _cyclic_transitive_generators(stab, collection)
    indices = [0] if stab.transitive else list(range(len(collection.spaces)))
    log: list[str] = [
        f"stabilizer order {stab.order}, "
        f"{'transitive' if stab.transitive else 'not transitive'} on members",
    ]
    candidates: list[tuple[int, LinearMap]] = []
    candidate_classes: list[tuple[int, tuple[LinearMap, ...]]] = []
    results: list[SearchResult] = []
    seen_codes: set[tuple] = set()
    for index in indices:
        found = transition_maps(collection, newcomer, index, cap=backtrack_cap)
        classes: dict[bytes, LinearMap] = {}
        for mapping in found:
            coset = [mapping.compose(s) for s in stab]
            representative = min(coset, key=lambda g: g.key)
            classes.setdefault(representative.key, representative)
        reps = tuple(classes[k] for k in sorted(classes))
        candidate_classes.append((index, reps))
        log.append(f"index {index}: {len(found)} candidate maps in "
                   f"{len(reps)} classes modulo the stabilizer")
        for mapping in found:
            candidates.append((index, mapping))
            trials: list[tuple[LinearMap, ...]] = [(mapping,)]
            trials.extend((t, mapping) for t in transitive_gens)
            for generators in trials:
                fps = "+".join(_fingerprint(g.key) for g in generators)
                group = group_closure(generators, cap=group_cap)
                if not group.complete:
                    log.append(f"  <{fps}>: {group.describe()}, skipped")
                    continue
                try:
                    states = orbit_code(group, collection, params, cap=orbit_cap)
                except OrbitVerificationError:
                    log.append(f"  <{fps}>: group order {group.order}, "
                               "orbit fails verification")
                    continue
                except CapExceeded:
                    log.append(f"  <{fps}>: group order {group.order}, "
                               f"orbit exceeds {orbit_cap}, skipped")
                    continue
                signature = (group.order, tuple(sorted(c.key for c in states)))
                if signature in seen_codes:
                    continue
                seen_codes.add(signature)
                log.append(f"  <{fps}>: group order {group.order}, "
                           f"orbit {len(states)}, verified")
                results.append(SearchResult(mapping, group, states))
    results.sort(key=lambda res: (len(res.states), res.group.order,
                                  res.transition.key))
    return SearchOutcome(stab, transitive_gens, tuple(candidates),
                         tuple(candidate_classes), tuple(results), tuple(log))
