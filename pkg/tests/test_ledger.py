import json
import random
from dataclasses import replace

import pytest

from pde.errors import InvalidCodeError
from pde.ledger import (
    GENESIS_HASH,
    DefinitionRecord,
    Dictionary,
    DuplicateLabelError,
    EmptyChainError,
    EmptyMeaningError,
    EmptyRationaleError,
    LedgerError,
    StorageError,
    UnknownVersionError,
    canonical_bytes,
    load_dictionary,
    record_from_json,
    record_to_json,
    save_dictionary,
    verify_chain,
)

# sha256 of the documented canonical byte layout, computed with an external
# reference implementation (sha256sum) and frozen here.
GOLDEN_GENESIS_P01 = "1d60af72270b04d78620398ba6b8f1d52e79ee083b5c48cc6dedd96950336f13"
GOLDEN_GENESIS_P02 = "bd50f3d4728dc6c7fc9c72b6a40b645edf537ef4a018361883eb583c068c33b6"


def test_canonical_byte_layout():
    got = canonical_bytes(0, "p02", "female", "Person", "en", "bootstrap", 0, "0" * 64)
    assert got == b"0\np02\nfemale\nPerson\nen\nbootstrap\n0\n" + b"0" * 64 + b"\n"


def test_first_record_uses_genesis_sentinel():
    dictionary = Dictionary()
    record = dictionary.add_definition(
        "p02", "female", "Person", "en", "bootstrap", clock=lambda: 0
    )
    assert record.definition_id == 0
    assert record.prev_hash == GENESIS_HASH
    assert record.hash == GOLDEN_GENESIS_P02


def test_bootstrap_genesis_hash_matches_external_reference(bootstrap):
    assert bootstrap.records[0].hash == GOLDEN_GENESIS_P01


def test_add_rejects_invalid_code():
    with pytest.raises(InvalidCodeError):
        Dictionary().add_definition("S01", "anything", "Other")


def test_add_rejects_empty_meaning():
    with pytest.raises(EmptyMeaningError):
        Dictionary().add_definition("q01", "", "Other")


def test_add_rejects_newlines_in_fields():
    with pytest.raises(LedgerError):
        Dictionary().add_definition("q01", "two\nlines", "Other")


def test_get_definition(bootstrap):
    resolved = bootstrap.get_definition("bG1")
    assert resolved.meaning == "sea"
    assert resolved.category == "Background"
    assert bootstrap.get_definition("zzz") is None


def test_ids_follow_chain_position(bootstrap):
    for position, record in enumerate(bootstrap.records):
        assert record.definition_id == position


def test_redefinition_appends_and_shadows():
    dictionary = Dictionary.bootstrap()
    before = len(dictionary.records)
    dictionary.add_definition("a11", "rest", "Action", clock=lambda: 9)
    assert len(dictionary.records) == before + 1
    assert dictionary.get_definition("a11").meaning == "rest"
    assert dictionary.records[before].prev_hash == dictionary.records[before - 1].hash


# -- verification ---------------------------------------------------------------


def test_fresh_chain_verifies(bootstrap):
    assert bootstrap.verify().ok


def test_mutated_meaning_is_detected(bootstrap):
    records = list(bootstrap.records)
    records[3] = replace(records[3], meaning=records[3].meaning + "x")
    verdict = verify_chain(records)
    assert not verdict.ok
    assert verdict.first_bad_id == 3
    assert verdict.reason == "HashMismatch"


def test_spliced_out_record_is_detected(bootstrap):
    records = list(bootstrap.records)
    del records[2]
    verdict = verify_chain(records)
    assert not verdict.ok
    assert verdict.first_bad_id == 2
    assert verdict.reason == "LinkMismatch"


def test_swapped_records_are_detected(bootstrap):
    records = list(bootstrap.records)
    records[1], records[2] = records[2], records[1]
    verdict = verify_chain(records)
    assert not verdict.ok
    assert verdict.first_bad_id == 1


def test_truncated_tail_needs_the_head_anchor(bootstrap):
    records = list(bootstrap.records)
    head = records[-1].hash
    truncated = records[:-1]
    assert verify_chain(truncated).ok  # a valid prefix is a valid chain
    assert not verify_chain(truncated, expected_head=head).ok


# -- versions and forks -----------------------------------------------------------


def test_snapshot_pins_the_head():
    dictionary = Dictionary.bootstrap()
    version = dictionary.snapshot_version("PDE Core 100")
    assert version.head_id == len(dictionary.records) - 1
    assert version.head_hash == dictionary.records[-1].hash


def test_snapshot_errors():
    with pytest.raises(EmptyChainError):
        Dictionary().snapshot_version("v1")
    dictionary = Dictionary.bootstrap()
    dictionary.snapshot_version("v1")
    with pytest.raises(DuplicateLabelError):
        dictionary.snapshot_version("v1")


def test_snapshot_is_stable_across_later_appends():
    dictionary = Dictionary.bootstrap()
    dictionary.snapshot_version("v1")
    pinned = dictionary.get_definition("a11", at="v1")
    dictionary.add_definition("a11", "rest", "Action", clock=lambda: 9)
    assert dictionary.get_definition("a11", at="v1") == pinned
    assert dictionary.get_definition("a11").meaning == "rest"


def test_fork_resolves_parent_then_shadows():
    dictionary = Dictionary.bootstrap()
    dictionary.snapshot_version("v1")
    fork = dictionary.fork("v1", "medicine", "clinical vocabulary")
    assert fork.records == []
    assert dictionary.get_definition("p02", at="medicine").meaning == "female"
    dictionary.add_definition("p02", "patient", "Person", clock=lambda: 5, fork_id="medicine")
    assert dictionary.get_definition("p02", at="medicine").meaning == "patient"
    assert dictionary.get_definition("p02").meaning == "female"


def test_fork_chain_verifies_against_parent_head():
    dictionary = Dictionary.bootstrap()
    version = dictionary.snapshot_version("v1")
    dictionary.fork("v1", "medicine", "clinical vocabulary")
    dictionary.add_definition("p02", "patient", "Person", clock=lambda: 5, fork_id="medicine")
    assert dictionary.verify(fork_id="medicine").ok
    assert dictionary.forks["medicine"].records[0].prev_hash == version.head_hash


def test_fork_sees_parent_only_up_to_the_snapshot():
    dictionary = Dictionary.bootstrap()
    dictionary.snapshot_version("v1")
    dictionary.fork("v1", "medicine", "clinical vocabulary")
    dictionary.add_definition("a11", "rest", "Action", clock=lambda: 9)
    assert dictionary.get_definition("a11", at="medicine").meaning == "sit"


def test_fork_errors():
    dictionary = Dictionary.bootstrap()
    with pytest.raises(UnknownVersionError):
        dictionary.fork("missing", "f1", "why")
    dictionary.snapshot_version("v1")
    with pytest.raises(EmptyRationaleError):
        dictionary.fork("v1", "f1", "")
    dictionary.fork("v1", "f1", "why")
    with pytest.raises(DuplicateLabelError):
        dictionary.fork("v1", "f1", "again")
    with pytest.raises(UnknownVersionError):
        dictionary.get_definition("p02", at="nowhere")


def test_view_matches_linear_scan_oracle():
    dictionary = Dictionary.bootstrap()
    version = dictionary.snapshot_version("v1")
    dictionary.fork("v1", "medicine", "clinical vocabulary")
    dictionary.add_definition("p02", "patient", "Person", clock=lambda: 5, fork_id="medicine")
    dictionary.add_definition("q01", "probe", "Other", clock=lambda: 6, fork_id="medicine")
    dictionary.add_definition("a11", "rest", "Action", clock=lambda: 7)

    pinned = version.head_id + 1
    for at in (None, "v1", "medicine"):
        view = dictionary.view(at)
        # Oracle: parent records up to the pinned head, then fork records.
        if at == "medicine":
            sequence = list(dictionary.records[:pinned]) + dictionary.forks["medicine"].records
        elif at == "v1":
            sequence = list(dictionary.records[:pinned])
        else:
            sequence = list(dictionary.records)
        expected = {}
        for record in sequence:
            expected[record.code] = record.meaning
        assert {code: view.resolve(code).meaning for code in view.codes()} == expected


# -- persistence -------------------------------------------------------------------


def test_record_json_round_trip(bootstrap):
    record = bootstrap.records[0]
    assert record_from_json(record_to_json(record)) == record


def test_record_json_rejects_wrong_fields():
    with pytest.raises(StorageError):
        record_from_json("{}")
    with pytest.raises(StorageError):
        record_from_json("not json")
    line = record_to_json(Dictionary.bootstrap().records[0])
    data = json.loads(line)
    data["extra"] = 1
    with pytest.raises(StorageError):
        record_from_json(json.dumps(data))


def test_save_and_load_round_trip(tmp_path):
    dictionary = Dictionary.bootstrap()
    dictionary.snapshot_version("v1")
    dictionary.fork("v1", "medicine", "clinical vocabulary")
    dictionary.add_definition("p02", "patient", "Person", clock=lambda: 5, fork_id="medicine")
    path = tmp_path / "dict.jsonl"
    save_dictionary(dictionary, path)

    loaded = load_dictionary(path)
    assert loaded.records == dictionary.records
    assert loaded.versions == dictionary.versions
    assert loaded.forks["medicine"].records == dictionary.forks["medicine"].records
    assert loaded.verify().ok
    assert loaded.verify(fork_id="medicine").ok


def test_bootstrap_replay_is_deterministic(tmp_path):
    first = Dictionary.bootstrap()
    second = Dictionary.bootstrap()
    assert first.records == second.records
    path_a = tmp_path / "a.jsonl"
    path_b = tmp_path / "b.jsonl"
    save_dictionary(first, path_a)
    save_dictionary(second, path_b)
    assert path_a.read_bytes() == path_b.read_bytes()


def test_append_only_file_grows_by_one_line(tmp_path):
    from pde.ledger import append_record

    dictionary = Dictionary.bootstrap()
    path = tmp_path / "dict.jsonl"
    save_dictionary(dictionary, path)
    before = path.read_text().splitlines()
    record = dictionary.add_definition("q01", "probe", "Other", clock=lambda: 3)
    append_record(path, record)
    after = path.read_text().splitlines()
    assert after[:-1] == before
    assert record_from_json(after[-1]) == record
    assert load_dictionary(path).verify().ok


# -- randomized scripts against a naive oracle ----------------------------------------


class NaiveLedger:
    """Plain-list oracle with no hashing: main list, version prefixes,
    fork lists resolved parent-first."""

    def __init__(self):
        self.main = []
        self.versions = {}
        self.forks = {}

    def add(self, code, meaning, fork=None):
        (self.forks[fork][1] if fork else self.main).append((code, meaning))

    def snapshot(self, label):
        self.versions[label] = len(self.main)

    def fork(self, label, fork_id):
        self.forks[fork_id] = (self.versions[label], [])

    def get(self, code, at=None):
        if at is None:
            sequence = self.main
        elif at in self.versions:
            sequence = self.main[: self.versions[at]]
        else:
            prefix, entries = self.forks[at]
            sequence = self.main[:prefix] + entries
        for entry_code, meaning in reversed(sequence):
            if entry_code == code:
                return meaning
        return None


def run_random_script(seed: int):
    rng = random.Random(seed)
    codes = ["q01", "q02", "w01", "w02", "n01"]
    real = Dictionary()
    naive = NaiveLedger()
    tick = iter(range(10_000))
    for step in range(30):
        roll = rng.random()
        if roll < 0.5 or not real.records:
            code = rng.choice(codes)
            meaning = f"m{step}"
            real.add_definition(code, meaning, "Other", clock=lambda: next(tick))
            naive.add(code, meaning)
        elif roll < 0.65:
            label = f"v{step}"
            real.snapshot_version(label)
            naive.snapshot(label)
        elif roll < 0.8 and real.versions:
            label = rng.choice(sorted(real.versions))
            fork_id = f"f{step}"
            real.fork(label, fork_id, "exercise")
            naive.fork(label, fork_id)
        elif real.forks:
            fork_id = rng.choice(sorted(real.forks))
            code = rng.choice(codes)
            meaning = f"m{step}-fork"
            real.add_definition(code, meaning, "Other", clock=lambda: next(tick), fork_id=fork_id)
            naive.add(code, meaning, fork=fork_id)
    views = [None] + sorted(real.versions) + sorted(real.forks)
    for at in views:
        for code in codes:
            resolved = real.get_definition(code, at=at)
            assert (resolved.meaning if resolved else None) == naive.get(code, at)
    assert real.verify().ok
    for fork_id in real.forks:
        assert real.verify(fork_id=fork_id).ok


def test_randomized_scripts_match_oracle():
    for seed in range(25):
        run_random_script(seed)
