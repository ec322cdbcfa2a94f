"""Append-only, hash-chained dictionary of code definitions.

Every definition is one immutable record. The hash of a record is SHA-256
over a fixed byte layout so independent implementations agree bit for bit:

    utf-8 of each field, in this order, each followed by one 0x0A byte:
    definition_id (decimal), code, meaning, category, language, author,
    timestamp (decimal seconds UTC), prev_hash (lowercase hex)

The digest is rendered as lowercase hex. Record 0 links to a genesis
sentinel of 64 zeros; every later record links to its predecessor's hash.
Records are never edited: redefining a code appends a new record that
shadows the old one in views. Versions pin a label to a chain position, and
forks start their own chain whose genesis is the parent version's head hash.

Persistence is a line-delimited JSON file (one record per line, append-only)
plus a sibling manifest for versions and fork metadata; fork chains live in
sibling files. This is a single-node verifiable chain: replication and
consensus are out of scope.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .errors import InvalidCodeError, PdeError
from .lexicon import LexiconError, validate_code

GENESIS_HASH = "0" * 64

_RECORD_FIELDS = (
    "definition_id",
    "code",
    "meaning",
    "category",
    "language",
    "author",
    "timestamp",
    "prev_hash",
    "hash",
)


class LedgerError(PdeError):
    pass


class EmptyMeaningError(LedgerError):
    pass


class UnknownVersionError(LedgerError):
    def __init__(self, label: str):
        super().__init__(f"unknown version or fork {label!r}")
        self.label = label


class DuplicateLabelError(LedgerError):
    pass


class EmptyChainError(LedgerError):
    pass


class EmptyRationaleError(LedgerError):
    pass


class StorageError(LedgerError):
    pass


@dataclass(frozen=True)
class DefinitionRecord:
    definition_id: int
    code: str
    meaning: str
    category: str
    language: str
    author: str
    timestamp: int
    prev_hash: str
    hash: str

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _RECORD_FIELDS}


def canonical_bytes(
    definition_id: int,
    code: str,
    meaning: str,
    category: str,
    language: str,
    author: str,
    timestamp: int,
    prev_hash: str,
) -> bytes:
    fields = (
        str(definition_id),
        code,
        meaning,
        category,
        language,
        author,
        str(timestamp),
        prev_hash,
    )
    return b"".join(f.encode("utf-8") + b"\n" for f in fields)


def compute_hash(
    definition_id: int,
    code: str,
    meaning: str,
    category: str,
    language: str,
    author: str,
    timestamp: int,
    prev_hash: str,
) -> str:
    digest = hashlib.sha256(
        canonical_bytes(
            definition_id, code, meaning, category, language, author, timestamp, prev_hash
        )
    )
    return digest.hexdigest()


def _record_hash(record: DefinitionRecord) -> str:
    return compute_hash(
        record.definition_id,
        record.code,
        record.meaning,
        record.category,
        record.language,
        record.author,
        record.timestamp,
        record.prev_hash,
    )


@dataclass(frozen=True)
class ChainVerdict:
    ok: bool
    first_bad_id: int | None = None
    reason: str | None = None  # HashMismatch | LinkMismatch | IdMismatch | HeadMismatch


CHAIN_OK = ChainVerdict(True)


def verify_chain(
    records: Iterable[DefinitionRecord],
    genesis: str = GENESIS_HASH,
    expected_head: str | None = None,
) -> ChainVerdict:
    """Recompute every hash and link; report the first record that fails.

    A truncated tail is only detectable against an external anchor, so pass
    expected_head (e.g. a version's head hash) to check it.
    """
    records = list(records)
    prev = genesis
    for position, record in enumerate(records):
        if record.prev_hash != prev:
            return ChainVerdict(False, position, "LinkMismatch")
        if _record_hash(record) != record.hash:
            return ChainVerdict(False, position, "HashMismatch")
        if record.definition_id != position:
            return ChainVerdict(False, position, "IdMismatch")
        prev = record.hash
    if expected_head is not None:
        head = records[-1].hash if records else genesis
        if head != expected_head:
            return ChainVerdict(False, len(records) - 1 if records else 0, "HeadMismatch")
    return CHAIN_OK


@dataclass(frozen=True)
class DictionaryVersion:
    label: str
    head_id: int
    head_hash: str


@dataclass
class Fork:
    fork_id: str
    parent_version: DictionaryVersion
    rationale: str
    records: list[DefinitionRecord]


@dataclass(frozen=True)
class ResolvedDefinition:
    code: str
    meaning: str
    category: str
    author: str
    timestamp: int
    definition_id: int


class DictionaryView:
    """Immutable code->definition mapping at a fixed version or fork head."""

    def __init__(self, resolved: Mapping[str, ResolvedDefinition]):
        self._resolved = dict(resolved)

    def resolve(self, code: str) -> ResolvedDefinition | None:
        return self._resolved.get(code)

    def codes(self) -> tuple[str, ...]:
        return tuple(self._resolved)

    def __contains__(self, code: str) -> bool:
        return code in self._resolved

    def __len__(self) -> int:
        return len(self._resolved)


def _default_clock() -> int:
    return int(time.time())


class Dictionary:
    """A main chain plus labeled version snapshots and forked chains.

    Appends are the only mutation. Reads never change state, so views and
    verification are safe to share across threads; callers serialize appends.
    """

    def __init__(self):
        self._records: list[DefinitionRecord] = []
        self._versions: dict[str, DictionaryVersion] = {}
        self._forks: dict[str, Fork] = {}

    # -- introspection --------------------------------------------------

    @property
    def records(self) -> tuple[DefinitionRecord, ...]:
        return tuple(self._records)

    @property
    def versions(self) -> dict[str, DictionaryVersion]:
        return dict(self._versions)

    @property
    def forks(self) -> dict[str, Fork]:
        return dict(self._forks)

    def head_hash(self, fork_id: str | None = None) -> str:
        chain, genesis = self._chain_for(fork_id)
        return chain[-1].hash if chain else genesis

    # -- operations ------------------------------------------------------

    def add_definition(
        self,
        code: str,
        meaning: str,
        category: str,
        language: str = "en",
        author: str = "",
        *,
        clock: Callable[[], int] | None = None,
        fork_id: str | None = None,
    ) -> DefinitionRecord:
        try:
            validate_code(code)
        except LexiconError as exc:
            raise InvalidCodeError(code, exc) from exc
        if not meaning:
            raise EmptyMeaningError("meaning must be non-empty")
        for name, value in (
            ("code", code),
            ("meaning", meaning),
            ("category", category),
            ("language", language),
            ("author", author),
        ):
            if "\n" in value:
                raise LedgerError(f"{name} must not contain a newline")
        chain, genesis = self._chain_for(fork_id)
        prev_hash = chain[-1].hash if chain else genesis
        definition_id = len(chain)
        timestamp = (clock or _default_clock)()
        record = DefinitionRecord(
            definition_id=definition_id,
            code=code,
            meaning=meaning,
            category=category,
            language=language,
            author=author,
            timestamp=timestamp,
            prev_hash=prev_hash,
            hash=compute_hash(
                definition_id, code, meaning, category, language, author, timestamp, prev_hash
            ),
        )
        chain.append(record)
        return record

    def get_definition(self, code: str, at: str | None = None) -> ResolvedDefinition | None:
        """Most recent definition of a code at a version/fork head; None if absent."""
        for record in reversed(self._resolution_sequence(at)):
            if record.code == code:
                return _resolved(record)
        return None

    def verify(
        self, fork_id: str | None = None, expected_head: str | None = None
    ) -> ChainVerdict:
        chain, genesis = self._chain_for(fork_id)
        return verify_chain(chain, genesis, expected_head)

    def snapshot_version(self, label: str) -> DictionaryVersion:
        if not self._records:
            raise EmptyChainError("cannot snapshot an empty chain")
        if label in self._versions:
            raise DuplicateLabelError(f"version {label!r} already exists")
        head = self._records[-1]
        version = DictionaryVersion(label, head.definition_id, head.hash)
        self._versions[label] = version
        return version

    def fork(self, parent_version: str, fork_id: str, rationale: str) -> Fork:
        if parent_version not in self._versions:
            raise UnknownVersionError(parent_version)
        if not rationale:
            raise EmptyRationaleError("fork rationale must be non-empty")
        if fork_id in self._forks or fork_id in self._versions:
            raise DuplicateLabelError(f"fork {fork_id!r} already exists")
        fork = Fork(fork_id, self._versions[parent_version], rationale, [])
        self._forks[fork_id] = fork
        return fork

    def view(self, at: str | None = None) -> DictionaryView:
        resolved: dict[str, ResolvedDefinition] = {}
        for record in self._resolution_sequence(at):
            resolved[record.code] = _resolved(record)  # later records shadow
        return DictionaryView(resolved)

    # -- internals --------------------------------------------------------

    def _chain_for(self, fork_id: str | None) -> tuple[list[DefinitionRecord], str]:
        if fork_id is None:
            return self._records, GENESIS_HASH
        fork = self._forks.get(fork_id)
        if fork is None:
            raise UnknownVersionError(fork_id)
        return fork.records, fork.parent_version.head_hash

    def _resolution_sequence(self, at: str | None) -> list[DefinitionRecord]:
        if at is None:
            return self._records
        version = self._versions.get(at)
        if version is not None:
            return self._records[: version.head_id + 1]
        fork = self._forks.get(at)
        if fork is not None:
            parent = self._records[: fork.parent_version.head_id + 1]
            return parent + fork.records
        raise UnknownVersionError(at)

    # -- bootstrap ---------------------------------------------------------

    @classmethod
    def bootstrap(cls, clock: Callable[[], int] | None = None) -> "Dictionary":
        """Replay the bundled definition list; the default clock is a constant 0
        so the resulting chain is byte-reproducible."""
        data = resources.files("pde").joinpath("data/bootstrap_definitions.json")
        entries = json.loads(data.read_text("utf-8"))
        dictionary = cls()
        fixed = clock or (lambda: 0)
        for entry in entries:
            dictionary.add_definition(
                entry["code"],
                entry["meaning"],
                entry["category"],
                entry.get("language", "en"),
                entry.get("author", "bootstrap"),
                clock=fixed,
            )
        return dictionary


def _resolved(record: DefinitionRecord) -> ResolvedDefinition:
    return ResolvedDefinition(
        code=record.code,
        meaning=record.meaning,
        category=record.category,
        author=record.author,
        timestamp=record.timestamp,
        definition_id=record.definition_id,
    )


# -- persistence ------------------------------------------------------------


def record_to_json(record: DefinitionRecord) -> str:
    return json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":"))


def record_from_json(line: str) -> DefinitionRecord:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise StorageError(f"bad record line: {exc}") from exc
    if not isinstance(data, dict) or set(data) != set(_RECORD_FIELDS):
        raise StorageError("record line does not have exactly the expected fields")
    try:
        return DefinitionRecord(**data)
    except TypeError as exc:
        raise StorageError(f"bad record line: {exc}") from exc


def manifest_path(chain_path: Path) -> Path:
    return chain_path.with_name(chain_path.stem + ".manifest.json")


def fork_path(chain_path: Path, fork_id: str) -> Path:
    return chain_path.with_name(f"{chain_path.stem}.fork-{fork_id}{chain_path.suffix}")


def _read_chain(path: Path) -> list[DefinitionRecord]:
    records = []
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(record_from_json(line))
    return records


def _write_chain(path: Path, records: Iterable[DefinitionRecord]):
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record_to_json(record) + "\n")


def append_record(chain_path: Path, record: DefinitionRecord, fork_id: str | None = None):
    path = chain_path if fork_id is None else fork_path(chain_path, fork_id)
    with path.open("a", encoding="utf-8") as handle:
        handle.write(record_to_json(record) + "\n")


def save_dictionary(dictionary: Dictionary, chain_path: Path):
    chain_path = Path(chain_path)
    _write_chain(chain_path, dictionary.records)
    manifest = {
        "versions": {
            label: {"head_id": v.head_id, "head_hash": v.head_hash}
            for label, v in dictionary.versions.items()
        },
        "forks": {
            fork_id: {"parent_version": f.parent_version.label, "rationale": f.rationale}
            for fork_id, f in dictionary.forks.items()
        },
    }
    if manifest["versions"] or manifest["forks"]:
        manifest_path(chain_path).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    for fork_id, fork in dictionary.forks.items():
        _write_chain(fork_path(chain_path, fork_id), fork.records)


def save_manifest(dictionary: Dictionary, chain_path: Path):
    chain_path = Path(chain_path)
    manifest = {
        "versions": {
            label: {"head_id": v.head_id, "head_hash": v.head_hash}
            for label, v in dictionary.versions.items()
        },
        "forks": {
            fork_id: {"parent_version": f.parent_version.label, "rationale": f.rationale}
            for fork_id, f in dictionary.forks.items()
        },
    }
    manifest_path(chain_path).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_dictionary(chain_path: Path) -> Dictionary:
    chain_path = Path(chain_path)
    dictionary = Dictionary()
    if chain_path.exists():
        dictionary._records = _read_chain(chain_path)
    mpath = manifest_path(chain_path)
    if mpath.exists():
        manifest = json.loads(mpath.read_text("utf-8"))
        for label, entry in manifest.get("versions", {}).items():
            dictionary._versions[label] = DictionaryVersion(
                label, entry["head_id"], entry["head_hash"]
            )
        for fork_id, entry in manifest.get("forks", {}).items():
            parent = dictionary._versions.get(entry["parent_version"])
            if parent is None:
                raise StorageError(
                    f"fork {fork_id!r} references unknown version {entry['parent_version']!r}"
                )
            fpath = fork_path(chain_path, fork_id)
            records = _read_chain(fpath) if fpath.exists() else []
            dictionary._forks[fork_id] = Fork(fork_id, parent, entry["rationale"], records)
    return dictionary
