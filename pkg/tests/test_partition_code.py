"""Tests for the partition model, its 56-state code and its symmetries."""

from __future__ import annotations

import itertools

import pytest

from frcodes.gf import GF
from frcodes.groupsearch import LinearMap, orbit_code
from frcodes.partition_code import (
    build_partition,
    canonical_seed_state,
    code_states,
    compose_semilinear,
    enumerate_semilinear,
    label_action,
    max_collection_size,
    maximum_collections,
    partition_params,
    repair_label,
    semilinear_map,
    symmetry_group,
    unique_maximum_collection,
)
from frcodes.storage import RepairingCollection
from frcodes.subspace import full_space, span, standard_basis_vector

F2 = GF(2)
F8 = GF(2, 3)


def test_build_partition_shapes(partition_model):
    model = partition_model
    assert model.plane == (0, 2, 4, 6)
    assert model.member(0) == span(F2, 5, [standard_basis_vector(5, 3),
                                           standard_basis_vector(5, 4)])
    assert model.field_block == span(F2, 5, [standard_basis_vector(5, i)
                                             for i in range(3)])
    assert len(model.members) == 8
    for b in range(8):
        assert model.member(b).dim == 2
        assert model.label(model.member(b)) == b
    with pytest.raises(ValueError):
        model.member(8)
    with pytest.raises(ValueError):
        model.label(model.field_block)


def test_partition_covers_every_vector_once(partition_model):
    model = partition_model
    seen = {}
    for v in model.field_block.vectors():
        if any(v):
            seen[tuple(v)] = "field block"
    assert len(seen) == 7
    for b in range(8):
        count = 0
        for v in model.member(b).vectors():
            if any(v):
                assert tuple(v) not in seen
                seen[tuple(v)] = b
                count += 1
        assert count == 3
    universe = {tuple(v) for v in full_space(F2, 5).vectors() if any(v)}
    assert set(seen) == universe


def test_pairwise_trivial_and_triples_span(partition_model):
    model = partition_model
    pairs = list(itertools.combinations(model.members, 2))
    assert len(pairs) == 28
    for a, b in pairs:
        assert (a & b).dim == 0
    triples = list(itertools.combinations(model.members, 3))
    assert len(triples) == 56
    for a, b, c in triples:
        assert (a + b + c).dim == 5


def test_vector_embedding_roundtrip(partition_model):
    model = partition_model
    for w in range(8):
        for u in model.plane:
            vec = model.vector_of(w, u)
            assert model.parts_of(vec) == (w, u)
    with pytest.raises(ValueError):
        model.vector_of(1, 1)
    with pytest.raises(ValueError):
        model.parts_of((1, 0, 0))


def test_repair_label_worked_case():
    # for labels 0, 1 and the generator the products sum to the
    # generator itself, whose square root is its fourth power
    label = repair_label(0, 1, 2)
    assert label == 6
    assert F8.mul(label, label) == 2
    assert repair_label(1, 0, 2) == label
    assert repair_label(2, 1, 0) == label


def test_repair_label_exhaustive():
    for b, g, d in itertools.combinations(range(8), 3):
        label = repair_label(b, g, d)
        total = F8.add(F8.add(F8.mul(b, g), F8.mul(b, d)), F8.mul(g, d))
        assert F8.mul(label, label) == total
        assert label not in (b, g, d)
        for perm in itertools.permutations((b, g, d)):
            assert repair_label(*perm) == label
    with pytest.raises(ValueError):
        repair_label(1, 1, 2)
    with pytest.raises(ValueError):
        repair_label(0, 1, 8)


def test_code_states(partition_model, partition_states):
    model = partition_model
    states = partition_states
    assert len(states) == 56
    assert states.verified
    assert states.report.full
    for check in states.report.checks:
        assert check.spanning_ok
        assert len(check.valid_newcomers) == 1
    for b, g, d in itertools.combinations(range(8), 3):
        collection = RepairingCollection([model.member(b), model.member(g),
                                          model.member(d)])
        expected = model.member(repair_label(b, g, d))
        assert states.transitions[collection.key] == (expected,)
        witness = states.witnesses[collection.key]
        assert witness.newcomer == expected
        assert all(w.dim == 1 for w in witness.witness.repair_spaces)


def test_canonical_seed_state(partition_model):
    collection, newcomer = canonical_seed_state(partition_model)
    labels = sorted(partition_model.label(u) for u in collection.spaces)
    assert labels == [0, 1, 2]
    assert partition_model.label(newcomer) == 6


def test_semilinear_identity(partition_model):
    assert semilinear_map(1, 0, 0, partition_model) == LinearMap.identity(F2, 5)
    with pytest.raises(ValueError):
        semilinear_map(0, 3, 1, partition_model)
    assert semilinear_map(3, 5, 3, partition_model) == \
        semilinear_map(3, 5, 0, partition_model)


def test_semilinear_action_exhaustive(partition_model):
    model = partition_model
    pairs = enumerate_semilinear(model)
    assert len(pairs) == 168
    assert len({mapping.key for _, mapping in pairs}) == 168
    for (a, b, i), mapping in pairs:
        for beta in range(8):
            assert mapping.apply(model.member(beta)) == \
                model.member(label_action(a, b, i, beta))


def test_semilinear_composition_exhaustive(partition_model):
    model = partition_model
    pairs = enumerate_semilinear(model)
    by_params = {params: mapping for params, mapping in pairs}
    for (g, inner), (h, outer) in itertools.product(pairs, repeat=2):
        assert outer.compose(inner) == by_params[compose_semilinear(h, g)]
    with pytest.raises(ValueError):
        compose_semilinear((0, 1, 0), (1, 1, 0))
    with pytest.raises(ValueError):
        label_action(0, 1, 0, 3)


def test_label_transport(partition_model):
    # moving a whole state by a symmetry transports the newcomer label
    # by the same label map
    pairs = enumerate_semilinear(partition_model)
    for (a, b, i), _ in pairs:
        for bl, gl, dl in itertools.combinations(range(8), 3):
            moved = repair_label(label_action(a, b, i, bl),
                                 label_action(a, b, i, gl),
                                 label_action(a, b, i, dl))
            assert moved == label_action(a, b, i, repair_label(bl, gl, dl))


def test_symmetry_group(partition_model, partition_states):
    group = symmetry_group(partition_model)
    assert group.complete
    assert group.order == 168
    assert {g.key for g in group} == \
        {mapping.key for _, mapping in enumerate_semilinear(partition_model)}
    collection, _ = canonical_seed_state(partition_model)
    states = orbit_code(group, collection, partition_params())
    assert {c.key for c in states} == {c.key for c in partition_states}


def test_max_collection_size(partition_model):
    assert max_collection_size(partition_model) == 8


def test_unique_maximum_collection(partition_model):
    witnesses = maximum_collections(partition_model)
    assert len(witnesses) == 59520
    canonical = tuple(sorted(u.key for u in partition_model.members))
    assert canonical in witnesses
    assert unique_maximum_collection(partition_model, witnesses=witnesses)
    # the stabilizer of the family inside the full linear group has
    # exactly the symmetry group's order
    general_linear_order = 1
    for i in range(5):
        general_linear_order *= 2**5 - 2**i
    assert general_linear_order == 9999360
    assert len(witnesses) * 168 == general_linear_order
