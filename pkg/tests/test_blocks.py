import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockspec.blocks import (
    Block,
    BlockLibrary,
    BlockSequence,
    Resonator,
    ResonatorSequence,
    ValidationError,
    contains_all_words,
    expand_blocks,
    pseudo_ergodic_word,
    sample_iid,
    standard_library,
    transition_matrix,
)

positive = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)


def test_resonator_rejects_nonpositive_parameters():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValidationError):
            Resonator(bad, 1.0, 1.0)
        with pytest.raises(ValidationError):
            Resonator(1.0, bad, 1.0)
        with pytest.raises(ValidationError):
            Resonator(1.0, 1.0, bad)


def test_block_must_be_nonempty():
    with pytest.raises(ValidationError):
        Block(())


def test_library_probability_validation():
    b = Block((Resonator(1, 1, 1),))
    with pytest.raises(ValidationError):
        BlockLibrary((b, b), (0.7, 0.2))
    with pytest.raises(ValidationError):
        BlockLibrary((b, b), (1.0, 0.0))
    BlockLibrary((b, b), (0.5, 0.5))


def test_standard_library_shape(std_library):
    assert std_library.num_blocks == 2
    mono, dimer = std_library.blocks
    assert [(r.length, r.spacing, r.wave_speed) for r in mono.resonators] == [(2, 2, 1)]
    assert [(r.length, r.spacing) for r in dimer.resonators] == [(1, 1), (1, 2)]


def test_library_json_round_trip(std_library, tmp_path):
    path = tmp_path / "lib.json"
    std_library.to_json(path)
    again = BlockLibrary.from_json(path)
    assert again == std_library


def test_sequence_validate(std_library):
    BlockSequence((1, 2, 2, 1)).validate(std_library)
    with pytest.raises(ValidationError):
        BlockSequence((1, 3)).validate(std_library)
    with pytest.raises(ValidationError):
        BlockSequence((0,)).validate(std_library)


def test_expand_blocks_offsets(std_library):
    seq = BlockSequence((1, 2, 1))
    rs = expand_blocks(std_library, seq)
    assert len(rs.resonators) == 4
    assert rs.block_offsets == (0, 1, 3)
    assert rs.lengths.tolist() == [2, 1, 1, 2]


@given(st.lists(st.integers(min_value=1, max_value=2), min_size=1, max_size=60))
def test_expand_length_is_sum_of_block_lengths(indices):
    lib = standard_library()
    rs = expand_blocks(lib, BlockSequence(tuple(indices)))
    expected = sum(len(lib.blocks[i - 1]) for i in indices)
    assert len(rs.resonators) == expected
    assert len(rs.block_offsets) == len(indices)


def test_reflected_reverses_and_remaps_spacings():
    rs = ResonatorSequence(
        (Resonator(1, 10, 1), Resonator(2, 20, 1), Resonator(3, 30, 1))
    )
    ref = rs.reflected()
    assert ref.lengths.tolist() == [3, 2, 1]
    # spacing k of the mirror is the gap that preceded the resonator
    assert ref.spacings.tolist()[:2] == [20, 10]


def test_reflected_is_involutive_on_interior():
    rng = np.random.Generator(np.random.Philox(5))
    rs = ResonatorSequence(
        tuple(Resonator(*rng.uniform(0.5, 1.5, 3)) for _ in range(7))
    )
    back = rs.reflected().reflected()
    assert back.lengths.tolist() == rs.lengths.tolist()
    assert back.spacings.tolist()[:-1] == pytest.approx(rs.spacings.tolist()[:-1])


def test_sample_iid_deterministic_and_valid(std_library):
    a = sample_iid(std_library, 500, seed=42)
    b = sample_iid(std_library, 500, seed=42)
    c = sample_iid(std_library, 500, seed=43)
    assert a.indices == b.indices
    assert a.indices != c.indices
    assert set(a.indices) <= {1, 2}
    assert a.provenance != "explicit"


def test_sample_iid_frequencies(std_library):
    seq = sample_iid(std_library, 20000, seed=0)
    frac = seq.indices.count(1) / len(seq)
    assert abs(frac - 0.5) < 0.02


def test_pseudo_ergodic_word_contains_all_words():
    for d, k in [(2, 2), (2, 3), (3, 2)]:
        seq = pseudo_ergodic_word(d, k)
        assert contains_all_words(seq, d, k)
    assert not contains_all_words([1, 1, 1, 1], 2, 2)


def test_transition_matrix_example(std_library):
    # states ordered (block, position): (1,1), (2,1), (2,2)
    t = transition_matrix(std_library)
    expected = np.array([[0.5, 0.5, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.0]])
    np.testing.assert_allclose(t, expected)
    np.testing.assert_allclose(t.sum(axis=1), 1.0)


@given(
    st.lists(positive, min_size=2, max_size=5),
    st.floats(min_value=0.1, max_value=0.9),
)
@settings(max_examples=40)
def test_library_dict_round_trip(lengths, p):
    blocks = tuple(Block((Resonator(l, 1.0, 1.0),)) for l in lengths[:2])
    lib = BlockLibrary(blocks, (p, 1.0 - p))
    assert BlockLibrary.from_dict(json.loads(json.dumps(lib.to_dict()))) == lib
