import math
import random

import pytest

from bitsyntax.bitio import BitReader, BitWriter
from bitsyntax.vlc import (
    BitString,
    Descend,
    DirectEntry,
    EscapeEntry,
    Leaf,
    VlcDecodeError,
    VlcEncodeError,
    VlcError,
    build_decoder,
    compile_map,
    decode_symbol,
    encode_symbol,
    verify_prefix_free,
)

from .support import (
    bits_to_bytes,
    brute_force_violations,
    build_naive_tree,
    naive_decode,
    random_prefix_free,
)

B = BitString


def test_bitstring_invariants():
    assert B(3, 3).value == 3
    with pytest.raises(VlcError):
        B(4, 2)
    with pytest.raises(VlcError):
        B(0, 0)
    assert B(0b10, 2).is_prefix_of(B(0b101, 3))
    assert not B(0b11, 2).is_prefix_of(B(0b101, 3))
    assert str(B(5, 4)) == "0b0101"


def test_prefix_violation_detected_in_declaration_order():
    violation = verify_prefix_free([B(0b0, 1), B(0b01, 2)])
    assert violation is not None
    assert (violation.first_index, violation.second_index) == (0, 1)
    assert "prefix" in str(violation)


def test_prefix_free_set_passes():
    assert verify_prefix_free([B(0, 2), B(1, 2), B(2, 2)]) is None


def test_duplicate_is_a_violation():
    violation = verify_prefix_free([B(2, 3), B(5, 3), B(2, 3)])
    assert violation is not None
    assert (violation.first_index, violation.second_index) == (0, 2)
    assert "duplicates" in str(violation)


def test_longer_first_still_detected():
    violation = verify_prefix_free([B(0b0101, 4), B(0b01, 2)])
    assert (violation.first_index, violation.second_index) == (0, 1)


def test_random_injection_matches_bruteforce_oracle():
    rng = random.Random(7)
    for _ in range(40):
        codes = random_prefix_free(rng, rng.randrange(2, 64), max_len=12)
        assert verify_prefix_free(codes) is None
        assert brute_force_violations(codes) == []
        victim = rng.randrange(len(codes))
        base = codes[victim]
        if base.bit_length < 24 and rng.random() < 0.7:
            extra = rng.randrange(1, 4)
            injected = B((base.value << extra) | rng.randrange(1 << extra),
                         base.bit_length + extra)
        else:
            injected = base
        perturbed = codes + [injected]
        expected_pair = (victim, len(perturbed) - 1)
        assert brute_force_violations(perturbed) == [expected_pair]
        violation = verify_prefix_free(perturbed)
        assert (violation.first_index, violation.second_index) == expected_pair


def test_decoder_single_node_three_leaves():
    dag = build_decoder([B(0, 2), B(1, 2), B(2, 2)], step=2)
    root = dag.root
    assert root.width == 2
    assert isinstance(root.lookup(0b00), Leaf)
    assert isinstance(root.lookup(0b01), Leaf)
    assert isinstance(root.lookup(0b10), Leaf)
    assert root.lookup(0b11) is None  # explicit failure slot
    assert all(leaf.consumed == 2 for leaf in root.leaves)
    assert dag.node_count == 1
    assert dag.slot_count == 4
    assert dag.depth == 1


def test_short_code_occupies_multiple_slots():
    dag = build_decoder([B(0b0, 1), B(0b10, 2), B(0b11, 2)], step=2)
    root = dag.root
    assert root.width == 2
    assert root.lookup(0b00) == Leaf(0, 1)
    assert root.lookup(0b01) == Leaf(0, 1)
    assert root.lookup(0b10) == Leaf(1, 2)
    assert root.lookup(0b11) == Leaf(2, 2)
    assert [leaf.consumed for leaf in root.leaves] == [1, 2, 2]


def test_descend_slots_are_proper_prefixes():
    codes = [B(0b00, 2), B(0b01, 2), B(0b1000, 4), B(0b1001, 4), B(0b11, 2)]
    dag = build_decoder(codes, step=2)
    root = dag.root
    descends = [slot for slot, out in root.filled_slots() if isinstance(out, Descend)]
    assert descends == [0b10]  # only the shared prefix of the two long codes
    child = root.lookup(0b10).child
    assert child.width == 2
    assert child.lookup(0b00) == Leaf(2, 2)
    assert child.lookup(0b01) == Leaf(3, 2)
    assert dag.depth == 2


def test_slot_accounting_invariant():
    rng = random.Random(11)
    for _ in range(25):
        codes = random_prefix_free(rng, rng.randrange(2, 128), max_len=16, drop=0.2)
        step = rng.choice([1, 2, 4, 8])
        dag = build_decoder(codes, step)
        for node in dag.walk():
            leaf_slots = sum(
                1 for _, out in node.filled_slots() if isinstance(out, Leaf)
            )
            expected = sum(1 << (node.width - leaf.consumed) for leaf in node.leaves)
            assert leaf_slots == expected
            assert node.leaves == sorted(node.leaves, key=lambda l: l.consumed)


def test_depth_bound():
    rng = random.Random(13)
    for _ in range(25):
        codes = random_prefix_free(rng, rng.randrange(2, 256), max_len=20, drop=0.1)
        for step in (1, 2, 4, 8):
            dag = build_decoder(codes, step)
            longest = max(c.bit_length for c in codes)
            assert dag.depth <= math.ceil(longest / step)


def test_dag_decode_equals_naive_tree():
    rng = random.Random(17)
    for _ in range(20):
        codes = random_prefix_free(rng, rng.randrange(2, 128), max_len=16, drop=0.15)
        cmap = compile_map("m", [DirectEntry(c, i) for i, c in enumerate(codes)],
                           step=rng.choice([1, 2, 4, 8]))
        tree = build_naive_tree(codes)
        longest = max(c.bit_length for c in codes)
        for _ in range(50):
            window = [rng.randrange(2) for _ in range(rng.randrange(0, longest + 9))]
            expected = naive_decode(tree, window)
            reader = BitReader(bits_to_bytes(window), bit_length=len(window))
            try:
                got = decode_symbol(cmap, reader)
            except VlcDecodeError:
                got = None
            assert got == expected, (window, got, expected)
            if expected is not None:
                assert reader.tell() == expected[1]


def test_escape_map_decode():
    cmap = compile_map(
        "esc",
        [
            DirectEntry(B(0b0, 1), 1),
            DirectEntry(B(0b10, 2), 2),
            EscapeEntry(B(0b11, 2), width=5),
        ],
        step=4,
    )
    value, consumed = decode_symbol(cmap, BitReader(bytes([0b11001110])))
    assert (value, consumed) == (7, 7)
    value, consumed = decode_symbol(cmap, BitReader(bytes([0b01000000])))
    assert (value, consumed) == (1, 1)


def test_escape_map_encode():
    cmap = compile_map(
        "esc",
        [
            DirectEntry(B(0b0, 1), 1),
            DirectEntry(B(0b10, 2), 2),
            EscapeEntry(B(0b11, 2), width=5),
        ],
    )
    w = BitWriter()
    assert encode_symbol(cmap, 1, w) == 1  # direct entries take precedence
    w = BitWriter()
    assert encode_symbol(cmap, 29, w) == 7
    value, consumed = decode_symbol(cmap, BitReader(w.getvalue()))
    assert (value, consumed) == (29, 7)
    with pytest.raises(VlcEncodeError):
        encode_symbol(cmap, 1 << 20, BitWriter())


def test_signed_escape_round_trip():
    cmap = compile_map(
        "sesc",
        [DirectEntry(B(0b0, 1), 99), EscapeEntry(B(0b1, 1), width=4, signed=True)],
    )
    for value in range(-8, 8):
        w = BitWriter()
        encode_symbol(cmap, value, w)
        got, _ = decode_symbol(cmap, BitReader(w.getvalue()))
        assert got == value
    with pytest.raises(VlcEncodeError):
        encode_symbol(cmap, 8, BitWriter())


def test_nested_map_cascade():
    inner = compile_map(
        "inner", [DirectEntry(B(0b0, 1), 10), EscapeEntry(B(0b1, 1), width=6)]
    )
    outer = compile_map(
        "outer",
        [DirectEntry(B(0b0, 1), 1), EscapeEntry(B(0b1, 1), nested=inner)],
    )
    # 1 (escape) 1 (inner escape) 000101 -> value 5
    bits = [1, 1, 0, 0, 0, 1, 0, 1]
    value, consumed = decode_symbol(outer, BitReader(bits_to_bytes(bits)))
    assert (value, consumed) == (5, 8)
    w = BitWriter()
    assert encode_symbol(outer, 10, w) == 2  # outer escape + inner direct
    value, _ = decode_symbol(outer, BitReader(w.getvalue()))
    assert value == 10


def test_decode_failure_on_uncovered_slot():
    cmap = compile_map(
        "blocks",
        [DirectEntry(B(0, 2), "a"), DirectEntry(B(1, 2), "b"), DirectEntry(B(2, 2), "c")],
        step=2,
    )
    with pytest.raises(VlcDecodeError):
        decode_symbol(cmap, BitReader(bytes([0b11000000])))


def test_decode_failure_at_stream_end():
    cmap = compile_map("m", [DirectEntry(B(0b101, 3), 1), DirectEntry(B(0b100, 3), 2)])
    reader = BitReader(bits_to_bytes([1, 0]), bit_length=2)
    with pytest.raises(VlcDecodeError):
        decode_symbol(cmap, reader)


def test_round_trip_all_direct_values():
    rng = random.Random(23)
    codes = random_prefix_free(rng, 50, max_len=12)
    cmap = compile_map("m", [DirectEntry(c, 1000 + i) for i, c in enumerate(codes)])
    for i, code in enumerate(codes):
        w = BitWriter()
        written = encode_symbol(cmap, 1000 + i, w)
        assert written == code.bit_length
        value, consumed = decode_symbol(cmap, BitReader(w.getvalue()))
        assert (value, consumed) == (1000 + i, code.bit_length)


def test_compile_map_rejects_prefix_violation():
    with pytest.raises(VlcError):
        compile_map("bad", [DirectEntry(B(0b0, 1), 1), DirectEntry(B(0b01, 2), 2)])


def test_stats_line():
    cmap = compile_map(
        "blocks_per_component",
        [
            DirectEntry(B(0b00, 2), (4, 1, 1)),
            DirectEntry(B(0b01, 2), (4, 2, 2)),
            DirectEntry(B(0b10, 2), (4, 4, 4)),
        ],
        step=2,
    )
    assert cmap.stats.render() == (
        "blocks_per_component entries=3 minlen=2 maxlen=2 nodes=1 slots=4 depth=1"
    )


def test_step_bounds():
    with pytest.raises(VlcError):
        build_decoder([B(0, 1)], step=0)
    with pytest.raises(VlcError):
        build_decoder([B(0, 1)], step=17)


def test_encoder_index_keeps_first_duplicate():
    cmap = compile_map(
        "dup", [DirectEntry(B(0b0, 1), 7), DirectEntry(B(0b10, 2), 7)]
    )
    w = BitWriter()
    assert encode_symbol(cmap, 7, w) == 1
