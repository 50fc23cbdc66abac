"""Command-line front door: load models, inspect holes and palettes, apply
and replay edit actions, print, and serve the JSON protocol.

Exit codes: 0 success, 1 parse/type errors, 2 contract violations (rejected
actions, holes present under --no-holes), 3 I/O errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import editing as E
from . import model as M
from . import parser as P
from . import service as S
from . import typesys as T
from .errors import (
    BlockNotSelectable, EngineError, HolesPresent, ParseError, UnknownRef,
)

EXIT_OK = 0
EXIT_MODEL_ERROR = 1
EXIT_CONTRACT = 2
EXIT_IO = 3


def _env_config() -> M.ModelConfig:
    max_arity = int(os.environ.get("MAX_ARITY", "4"))
    strict = os.environ.get("STRICT_DISJOINT_MINUS", "1") not in ("0", "false", "off")
    return M.ModelConfig(max_arity=max_arity, strict_disjoint_minus=strict)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def _load_session(args) -> E.EditSession:
    model = P.parse_model(_read(args.model), _env_config())
    session = E.EditSession(model)
    edits = getattr(args, "edits", None)
    if edits and os.path.exists(edits):
        for action in E.load_edit_script(_read(edits)):
            outcome = session.apply(action)
            if not outcome.ok:
                raise BlockNotSelectable(
                    "", outcome.reason_class or outcome.error_kind,
                    f"edit script action {E.action_to_wire(action)} rejected: "
                    f"{outcome.message}")
    return session


def _emit(args, records: list[dict], table_columns: list[str]):
    if args.format == "records":
        for r in records:
            print(json.dumps(r))
        return
    widths = {c: max([len(c)] + [len(str(r.get(c, ""))) for r in records])
              for c in table_columns}
    print("  ".join(c.ljust(widths[c]) for c in table_columns))
    for r in records:
        print("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in table_columns))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_load(args) -> int:
    model = P.parse_model(_read(args.model), _env_config())
    ctx = T.TypeContext(model)
    records = []
    for p in model.preds:
        holes = M.holes_in(p.body)
        if holes:
            status = "partial" if not ctx.possible(p.body).is_empty else "untypable"
            records.append({"pred": p.name, "status": status, "holes": len(holes)})
        else:
            kind = ctx.typeof(p.body)  # raises TypeProblem on errors
            records.append({"pred": p.name, "status": kind.kind_class, "holes": 0})
    records.insert(0, {"pred": "(model)", "status": f"{len(model.sigs)} sigs", "holes": ""})
    _emit(args, records, ["pred", "status", "holes"])
    return EXIT_OK


def cmd_state(args) -> int:
    session = _load_session(args)
    state = S.state_to_wire(session)
    if args.format == "records":
        print(json.dumps(state))
        return EXIT_OK
    records = []
    for pred in state["preds"]:
        def flatten(node, depth):
            records.append({
                "pred": pred["name"], "id": node["id"],
                "node": "  " * depth + node.get("op", node.get("ref",
                        node.get("pred", str(node.get("value",
                        "(?)" if "hole" in node else "?"))))),
                "shape": node["shape"],
                "label": node.get("hole", {}).get("label", ""),
            })
            for kid in node.get("children", ()):
                flatten(kid, depth + 1)
        flatten(pred["tree"], 0)
    _emit(args, records, ["pred", "id", "node", "shape", "label"])
    return EXIT_OK


def _resolve_target(session: E.EditSession, args) -> E.Target:
    if args.anchor is not None:
        return E.Anchor(int(args.anchor), args.side)
    hole = args.hole
    if hole == "root":
        if not args.pred:
            raise EngineError("--hole root needs --pred")
        body = session.model.pred(args.pred).body
        if not isinstance(body, M.Hole):
            raise EngineError(f"pred {args.pred} body is not a bare hole")
        return body.nid
    return int(hole)


def cmd_blocks(args) -> int:
    session = _load_session(args)
    target = _resolve_target(session, args)
    entries = session.enumerate_blocks(target)
    records = [S.entry_to_wire(e) for e in entries]
    _emit(args, records, ["key", "category", "status", "reason_class", "reason"])
    return EXIT_OK


def cmd_apply(args) -> int:
    session = _load_session(args)
    action = E.action_from_wire(json.loads(args.action))
    outcome = session.apply(action)
    if not outcome.ok:
        print(f"rejected: {outcome.reason_class or outcome.error_kind}: "
              f"{outcome.message}", file=sys.stderr)
        return EXIT_CONTRACT
    if args.edits:
        with open(args.edits, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(E.action_to_wire(action)) + "\n")
    print(P.print_model(session.model), end="")
    return EXIT_OK


def cmd_replay(args) -> int:
    actions = E.load_edit_script(_read(args.script))
    result = E.replay(_read(args.model), actions, halt_on_error=args.halt_on_error)
    records = []
    for i, o in enumerate(result.outcomes):
        records.append({
            "step": i, "action": json.dumps(E.action_to_wire(o.action)),
            "ok": o.ok, "reason_class": o.reason_class, "message": o.message,
        })
    _emit(args, records, ["step", "action", "ok", "reason_class", "message"])
    if args.print_model:
        print(P.print_model(result.model), end="")
    return EXIT_OK if result.ok else EXIT_CONTRACT


def cmd_print(args) -> int:
    session = _load_session(args)
    options = P.PrintOptions(allow_holes=not args.no_holes,
                             paren_policy="full" if args.full_parens else "minimal")
    print(P.print_model(session.model, options), end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    if args.socket:
        server = S.serve_socket(args.socket)
        print(f"listening on {args.socket}", file=sys.stderr)
        try:
            _wait_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.shutdown()
        return EXIT_OK
    S.serve_stdio()
    return EXIT_OK


def _wait_forever():
    import time
    while True:
        time.sleep(3600)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="alloyblocks",
                                  description="structure editor engine for Alloy")
    top.add_argument("--format", choices=("records", "table"),
                     default=os.environ.get("FORMAT", "table"))
    sub = top.add_subparsers(dest="command", required=True)

    def model_arg(p, edits=True):
        p.add_argument("model", help=".als model file")
        if edits:
            p.add_argument("--edits", help=".edits script establishing session state")

    p = sub.add_parser("load", help="parse and typecheck a model")
    model_arg(p, edits=False)
    p.set_defaults(func=cmd_load)

    p = sub.add_parser("state", help="dump the session tree")
    model_arg(p)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("blocks", help="palette with selectability for a target")
    model_arg(p)
    p.add_argument("--pred", help="pred name (for --hole root)")
    p.add_argument("--hole", help="hole node id, or 'root'")
    p.add_argument("--anchor", help="anchor node id")
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("apply", help="apply one action (JSON record)")
    model_arg(p)
    p.add_argument("action", help='e.g. {"action":"insert","hole":3,"block":"set:File"}')
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("replay", help="replay an edit script")
    p.add_argument("model")
    p.add_argument("script", help=".edits file, one JSON action per line")
    p.add_argument("--halt-on-error", action="store_true")
    p.add_argument("--print-model", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("print", help="pretty-print the model")
    model_arg(p)
    p.add_argument("--no-holes", action="store_true",
                   help="fail (exit 2) if holes remain")
    p.add_argument("--full-parens", action="store_true")
    p.set_defaults(func=cmd_print)

    p = sub.add_parser("serve", help="run the JSON protocol service")
    p.add_argument("--socket", help="unix socket path (default: stdio)")
    p.set_defaults(func=cmd_serve)
    return top


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_MODEL_ERROR
    except T.TypeProblem as exc:
        print(f"type error: {exc.detail()}", file=sys.stderr)
        return EXIT_MODEL_ERROR
    except UnknownRef as exc:
        print(f"name error: {exc}", file=sys.stderr)
        return EXIT_MODEL_ERROR
    except HolesPresent as exc:
        print(f"holes present: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except BlockNotSelectable as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except json.JSONDecodeError as exc:
        print(f"bad action JSON: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
