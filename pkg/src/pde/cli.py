"""Command-line interface.

Subcommands: decode, encode, validate, extract, calc, and dict
{add,get,verify,snapshot,fork,export}. Every command resolves codes against a
pinned dictionary view (--dict / --at); without a dictionary file the
built-in bootstrap dictionary is used. Exit status is 0 iff no diagnostics
were emitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from filelock import FileLock

from . import encoder, expansion, ledger, lexicon, numeric, parser
from .errors import PdeError

DICTIONARY_ENV = "PDE_DICTIONARY"


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text("utf-8")


def _dictionary_path(args) -> Path | None:
    if getattr(args, "dict", None):
        return Path(args.dict)
    env = os.environ.get(DICTIONARY_ENV)
    return Path(env) if env else None


def _load_dictionary(args) -> ledger.Dictionary:
    path = _dictionary_path(args)
    if path is None:
        return ledger.Dictionary.bootstrap()
    return ledger.load_dictionary(path)


def _require_dictionary_path(args) -> Path:
    path = _dictionary_path(args)
    if path is None:
        raise PdeError(
            f"this command writes to a dictionary file; pass --dict or set {DICTIONARY_ENV}"
        )
    return path


def _profile(args) -> expansion.OrderProfile:
    if getattr(args, "order", "svo") == "sov":
        return expansion.ENGLISH_SOV
    return expansion.ENGLISH_SVO


def _diag(message: str) -> None:
    print(f"pde: {message}", file=sys.stderr)


def _emit(obj: dict) -> None:
    print(json.dumps(obj))


# -- commands ----------------------------------------------------------------


def cmd_decode(args) -> int:
    document = _read_input(args.input)
    result = parser.extract_blocks(document)
    view = _load_dictionary(args).view(args.at)
    profile = _profile(args)
    failures = 0
    for diagnostic in result.diagnostics:
        _diag(f"{diagnostic.message} (at {diagnostic.span[0]}..{diagnostic.span[1]})")
        failures += 1
    for block_text in result.blocks:
        try:
            block = parser.parse_text(block_text.text)
            rendered = expansion.render_block(block, view, profile)
        except PdeError as exc:
            _diag(f"block at {block_text.span[0]}..{block_text.span[1]}: {exc}")
            failures += 1
            continue
        if args.format == "json":
            _emit(
                {
                    "span": list(block_text.span),
                    "source": block_text.text,
                    "text": rendered,
                    "ast": block.to_dict(),
                }
            )
        else:
            print(rendered)
    return 1 if failures else 0


def cmd_extract(args) -> int:
    document = _read_input(args.input)
    result = parser.extract_blocks(document)
    for diagnostic in result.diagnostics:
        _diag(f"{diagnostic.message} (at {diagnostic.span[0]}..{diagnostic.span[1]})")
    for block_text in result.blocks:
        if args.format == "json":
            _emit({"span": list(block_text.span), "source": block_text.text})
        else:
            print(block_text.text)
    return 1 if result.diagnostics else 0


def cmd_encode(args) -> int:
    data = json.loads(_read_input(args.frames))
    frames = data if isinstance(data, list) else [data]
    view = _load_dictionary(args).view(args.at)
    lines = []
    for entry in frames:
        frame = encoder.frame_from_json(entry)
        line = encoder.encode_frame(frame)
        for token in line.split():
            raw = token.rstrip(".")
            code = _word_code(raw)
            if code is not None and raw not in view:
                raise PdeError(f"code {raw!r} does not resolve in the dictionary")
        lines.append(line)
    for line in lines:
        if args.format == "json":
            _emit({"line": line})
        else:
            print(line)
    return 0


def _word_code(raw: str) -> lexicon.Code | None:
    """The validated code when raw is a word code, else None."""
    if raw in ("PDE", "") or raw in numeric.FUNCTIONS or raw.isdigit():
        return None
    try:
        code = lexicon.validate_code(raw)
    except lexicon.LexiconError:
        return None
    if code.code_class is lexicon.CodeClass.SYNTAX_CONTROL:
        return None
    return code


def cmd_validate(args) -> int:
    text = _read_input("-") if args.tokens == "-" else args.tokens
    for raw in text.split():
        raw = raw.rstrip(".")
        if not raw:
            continue
        suggestion = lexicon.suggest_substitution(raw)
        try:
            code = lexicon.validate_code(raw)
        except lexicon.LexiconError as exc:
            entry = {
                "token": raw,
                "ok": False,
                "error": str(exc),
                "suggestion": suggestion if suggestion != raw else None,
            }
            if args.format == "json":
                _emit(entry)
            elif entry["suggestion"]:
                print(f"{raw}: {exc}; suggestion: {suggestion}")
            else:
                print(f"{raw}: {exc}")
            continue
        if args.format == "json":
            _emit(
                {
                    "token": raw,
                    "ok": True,
                    "code_class": code.code_class.value,
                    "category": code.category.value if code.category else None,
                }
            )
        else:
            category = f", {code.category.value}" if code.category else ""
            print(f"{raw}: ok ({code.code_class.value}{category})")
    return 0


def cmd_calc(args) -> int:
    tree = numeric.parse_expr(args.expression)
    value = numeric.eval_expr(tree)
    english = numeric.render_expr(tree)
    if args.format == "json":
        _emit(
            {
                "expression": args.expression,
                "value": numeric.format_value(value),
                "english": english,
            }
        )
    else:
        print(f"{numeric.format_value(value)} — {english}")
    return 0


# -- dict subcommands --------------------------------------------------------


def _print_record(record: ledger.DefinitionRecord, args) -> None:
    if args.format == "json":
        _emit(record.to_dict())
    else:
        print(f"id={record.definition_id} code={record.code} hash={record.hash}")


def cmd_dict_add(args) -> int:
    path = _require_dictionary_path(args)
    clock = (lambda: args.timestamp) if args.timestamp is not None else None
    with FileLock(str(path) + ".lock"):
        dictionary = ledger.load_dictionary(path)
        record = dictionary.add_definition(
            args.code,
            args.meaning,
            args.category,
            args.language,
            args.author,
            clock=clock,
            fork_id=args.fork,
        )
        ledger.append_record(path, record, fork_id=args.fork)
    _print_record(record, args)
    return 0


def cmd_dict_get(args) -> int:
    dictionary = _load_dictionary(args)
    resolved = dictionary.get_definition(args.code, args.at)
    if resolved is None:
        if args.format == "json":
            _emit({"found": False, "code": args.code})
        else:
            print(f"{args.code}: not found")
        return 0
    if args.format == "json":
        _emit(
            {
                "found": True,
                "code": resolved.code,
                "meaning": resolved.meaning,
                "category": resolved.category,
                "author": resolved.author,
                "timestamp": resolved.timestamp,
                "definition_id": resolved.definition_id,
            }
        )
    else:
        print(
            f"{resolved.code}: {resolved.meaning} ({resolved.category})"
            f" author={resolved.author!r} timestamp={resolved.timestamp}"
            f" id={resolved.definition_id}"
        )
    return 0


def cmd_dict_verify(args) -> int:
    dictionary = _load_dictionary(args)
    verdict = dictionary.verify(fork_id=args.fork)
    if args.format == "json":
        _emit(
            {"ok": verdict.ok, "first_bad_id": verdict.first_bad_id, "reason": verdict.reason}
        )
    elif verdict.ok:
        print("Ok")
    else:
        print(f"Broken(first_bad_id={verdict.first_bad_id}, reason={verdict.reason})")
    return 0 if verdict.ok else 1


def cmd_dict_snapshot(args) -> int:
    path = _require_dictionary_path(args)
    with FileLock(str(path) + ".lock"):
        dictionary = ledger.load_dictionary(path)
        version = dictionary.snapshot_version(args.label)
        ledger.save_manifest(dictionary, path)
    if args.format == "json":
        _emit(
            {"label": version.label, "head_id": version.head_id, "head_hash": version.head_hash}
        )
    else:
        print(f"{version.label}: head_id={version.head_id} head_hash={version.head_hash}")
    return 0


def cmd_dict_fork(args) -> int:
    path = _require_dictionary_path(args)
    with FileLock(str(path) + ".lock"):
        dictionary = ledger.load_dictionary(path)
        fork = dictionary.fork(args.parent_version, args.fork_id, args.rationale)
        ledger.save_manifest(dictionary, path)
        ledger.fork_path(path, fork.fork_id).touch()
    if args.format == "json":
        _emit(
            {
                "fork_id": fork.fork_id,
                "parent_version": fork.parent_version.label,
                "rationale": fork.rationale,
            }
        )
    else:
        print(f"{fork.fork_id}: forked from {fork.parent_version.label}")
    return 0


def cmd_dict_export(args) -> int:
    dictionary = _load_dictionary(args)
    if args.fork is not None:
        fork = dictionary.forks.get(args.fork)
        if fork is None:
            raise ledger.UnknownVersionError(args.fork)
        records = fork.records
    else:
        records = dictionary.records
    for record in records:
        print(ledger.record_to_json(record))
    return 0


# -- argument parsing ---------------------------------------------------------


def _add_common(sub, dictionary=True):
    if dictionary:
        sub.add_argument(
            "--dict", help=f"dictionary chain file (default ${DICTIONARY_ENV} or built-in)"
        )
        sub.add_argument("--at", help="resolve codes at this version or fork")
    sub.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="pde", description=__doc__)
    commands = root.add_subparsers(dest="command", required=True)

    p = commands.add_parser("decode", help="extract, parse, and render blocks from a document")
    p.add_argument("input", nargs="?", default="-", help="input file or - for stdin")
    p.add_argument("--order", choices=("svo", "sov"), default="svo")
    _add_common(p)
    p.set_defaults(handler=cmd_decode)

    p = commands.add_parser("extract", help="list embedded blocks without decoding them")
    p.add_argument("input", nargs="?", default="-")
    _add_common(p, dictionary=False)
    p.set_defaults(handler=cmd_extract)

    p = commands.add_parser("encode", help="encode JSON semantic frames to code lines")
    p.add_argument("frames", nargs="?", default="-", help="frame JSON file or - for stdin")
    _add_common(p)
    p.set_defaults(handler=cmd_encode)

    p = commands.add_parser("validate", help="check tokens against the code alphabet")
    p.add_argument("tokens", help="whitespace-separated tokens, or - for stdin")
    _add_common(p, dictionary=False)
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser("calc", help="evaluate an arithmetic expression")
    p.add_argument("expression")
    _add_common(p, dictionary=False)
    p.set_defaults(handler=cmd_calc)

    dict_parser = commands.add_parser("dict", help="dictionary ledger operations")
    dict_commands = dict_parser.add_subparsers(dest="dict_command", required=True)

    p = dict_commands.add_parser("add", help="append a definition record")
    p.add_argument("--code", required=True)
    p.add_argument("--meaning", required=True)
    p.add_argument("--category", required=True)
    p.add_argument("--language", default="en")
    p.add_argument("--author", default="")
    p.add_argument("--timestamp", type=int, help="seconds UTC (default: current time)")
    p.add_argument("--fork", help="append to this fork instead of the main chain")
    _add_common(p)
    p.set_defaults(handler=cmd_dict_add)

    p = dict_commands.add_parser("get", help="look up the current definition of a code")
    p.add_argument("code")
    _add_common(p)
    p.set_defaults(handler=cmd_dict_get)

    p = dict_commands.add_parser("verify", help="recompute every hash and link")
    p.add_argument("--fork", help="verify this fork's chain")
    _add_common(p)
    p.set_defaults(handler=cmd_dict_verify)

    p = dict_commands.add_parser("snapshot", help="pin a version label to the current head")
    p.add_argument("label")
    _add_common(p)
    p.set_defaults(handler=cmd_dict_snapshot)

    p = dict_commands.add_parser("fork", help="start a fork from a version")
    p.add_argument("parent_version")
    p.add_argument("fork_id")
    p.add_argument("rationale")
    _add_common(p)
    p.set_defaults(handler=cmd_dict_fork)

    p = dict_commands.add_parser("export", help="print the chain as JSON lines")
    p.add_argument("--fork", help="export this fork's chain")
    _add_common(p)
    p.set_defaults(handler=cmd_dict_export)

    return root


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.handler(args)
    except PdeError as exc:
        _diag(str(exc))
        code = 1
    except (OSError, json.JSONDecodeError) as exc:
        _diag(str(exc))
        code = 1
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
