"""Long-running service speaking a JSON protocol for the block-editor frontend.

One protocol session maps to one EditSession (single-writer). Framing is
newline-delimited JSON over stdio and length-prefixed (4-byte big-endian)
over local sockets. Malformed frames are answered with structured errors,
never a crash.
"""
from __future__ import annotations

import json
import socket
import socketserver
import struct
import sys
import threading
from typing import Any, BinaryIO

from . import editing as E
from . import model as M
from . import parser as P
from . import typesys as T
from .errors import (
    BlockNotSelectable, EngineError, HolesPresent, ParseError, UnknownRef,
)

PROTOCOL_VERSION = 1
CAPABILITIES = ("load", "state", "blocks", "apply", "undo", "redo",
                "print", "constraints")


def hello_message() -> dict:
    return {"protocol": PROTOCOL_VERSION, "capabilities": list(CAPABILITIES)}


# ---------------------------------------------------------------------------
# State serialization
# ---------------------------------------------------------------------------

_SLOT_LABELS: dict[type, tuple[str, ...]] = {
    M.Quant: ("domain", "subformula"),
    M.Compare: ("lhs", "rhs"),
    M.IntCompare: ("lhs", "rhs"),
    M.BinRel: ("lhs", "rhs"),
    M.Prop: ("lhs", "rhs"),
    M.TempBin: ("lhs", "rhs"),
    M.UnRel: ("operand",),
    M.MultFormula: ("operand",),
    M.Not: ("operand",),
    M.Card: ("operand",),
    M.TempUn: ("operand",),
    M.Prime: ("operand",),
}


def hole_label(parent: M.Node | None, index: int) -> str:
    if parent is None:
        return "formula"
    labels = _SLOT_LABELS.get(type(parent))
    return labels[index] if labels else "slot"


_SHAPES = {M.EXPR: "rounded", M.FORMULA: "squared", M.INT: "int"}


def node_to_wire(node: M.Node, parent: M.Node | None = None, index: int = 0) -> dict:
    shape = _SHAPES[M.produced_class(node)]
    out: dict[str, Any] = {
        "id": node.nid,
        "form": type(node).__name__,
        "shape": shape,
        "text": P.print_node(node),
    }
    match node:
        case M.Hole(kind_class=kc):
            out["hole"] = {"class": kc, "label": hole_label(parent, index)}
        case M.SetLeaf(ref=ref):
            out["ref"] = ref
        case M.IntLit(value=v):
            out["value"] = v
        case M.PredCall(pred=p):
            out["pred"] = p
        case M.Quant(quant=q, var=v):
            out["op"] = q
            out["var"] = v
        case _:
            op = getattr(node, "op", None)
            if op is not None:
                out["op"] = op
            elif isinstance(node, M.Not):
                out["op"] = "!"
            elif isinstance(node, M.Card):
                out["op"] = "#"
            elif isinstance(node, M.Prime):
                out["op"] = "'"
    # anchors: expr and formula nodes expose left/right extension points
    if not isinstance(node, M.Hole) and shape in ("rounded", "squared"):
        out["anchors"] = ["left", "right"]
    kids = M.children(node)
    if kids:
        out["children"] = [node_to_wire(k, node, i) for i, k in enumerate(kids)]
    return out


def state_to_wire(session: E.EditSession) -> dict:
    model = session.model
    return {
        "text": P.print_model(model),
        "sigs": [
            {
                "name": s.name, "mutable": s.mutable, "abstract": s.abstract,
                "mult": s.mult, "extends": s.extends, "subsets": list(s.subsets),
                "fields": [
                    {"name": f.name, "columns": list(f.columns),
                     "mult": f.mult, "mutable": f.mutable}
                    for f in s.fields
                ],
            }
            for s in model.sigs
        ],
        "preds": [
            {"name": p.name, "root": p.body.nid, "tree": node_to_wire(p.body),
             "holes": [h.nid for h in M.holes_in(p.body)]}
            for p in model.preds
        ],
        "commands": [c.text for c in model.commands],
    }


def entry_to_wire(entry: E.PaletteEntry) -> dict:
    return {
        "key": entry.block.key,
        "category": entry.block.category,
        "label": entry.block.label,
        "status": entry.status,
        "reason_class": entry.reason_class,
        "reason": entry.reason,
    }


def constraint_to_wire(c: T.HoleConstraint) -> dict:
    def req_to_wire(req):
        return "nonempty" if req is T.NONEMPTY else req.render()

    return {
        "kind_class": c.kind_class,
        "arities": sorted(c.arities),
        "overlap": {str(a): [req_to_wire(r) for r in reqs] for a, reqs in c.overlap},
        "first_col": sorted(c.first_col) if c.first_col is not None else None,
        "last_col": sorted(c.last_col) if c.last_col is not None else None,
    }


# ---------------------------------------------------------------------------
# Request handling
# ---------------------------------------------------------------------------

def _parse_target(params: dict) -> E.Target:
    if "hole" in params:
        return int(params["hole"])
    if "anchor" in params:
        side = str(params.get("side", ""))
        return E.Anchor(int(params["anchor"]), side)
    raise EngineError("params need either 'hole' or 'anchor'+'side'")


class ProtocolSession:
    """Dispatches wire requests against one EditSession."""

    def __init__(self):
        self.session: E.EditSession | None = None

    def handle_line(self, raw: str | bytes) -> dict:
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _error_response(None, "bad_request", f"malformed JSON: {exc}")
        return self.handle(obj)

    def handle(self, obj: Any) -> dict:
        if not isinstance(obj, dict):
            return _error_response(None, "bad_request", "request must be an object")
        rid = obj.get("id")
        if not isinstance(rid, int):
            return _error_response(None, "bad_request", "request needs an integer id")
        method = obj.get("method")
        params = obj.get("params") or {}
        if not isinstance(params, dict):
            return _error_response(rid, "bad_request", "params must be an object")
        handler = getattr(self, f"_on_{method}", None) if isinstance(method, str) else None
        if handler is None:
            return _error_response(rid, "unknown_method", f"unknown method {method!r}")
        try:
            result = handler(params)
        except ParseError as exc:
            return _error_response(rid, "parse_error", str(exc))
        except T.TypeProblem as exc:
            return _error_response(rid, "type_error", exc.detail(),
                                   reason_class=exc.error_class)
        except BlockNotSelectable as exc:
            return _error_response(rid, "rejected", exc.human_reason,
                                   reason_class=exc.reason_class)
        except HolesPresent as exc:
            return _error_response(rid, "holes_present", str(exc))
        except (UnknownRef, EngineError) as exc:
            return _error_response(rid, "rejected", str(exc),
                                   reason_class=getattr(exc, "reason_class", ""))
        except Exception as exc:  # never crash the service on a bad frame
            return _error_response(rid, "internal", f"{type(exc).__name__}: {exc}")
        return {"id": rid, "ok": True, "result": result}

    def _require_session(self) -> E.EditSession:
        if self.session is None:
            raise EngineError("no model loaded; call load first")
        return self.session

    # -- methods -------------------------------------------------------------

    def _on_load(self, params: dict):
        if "text" in params:
            text = str(params["text"])
        elif "path" in params:
            with open(params["path"], "r", encoding="utf-8") as fh:
                text = fh.read()
        else:
            raise EngineError("load needs 'text' or 'path'")
        model = P.parse_model(text)
        self.session = E.EditSession(model)
        return {"loaded": True, "sigs": len(model.sigs), "preds": len(model.preds)}

    def _on_state(self, params: dict):
        return state_to_wire(self._require_session())

    def _on_blocks(self, params: dict):
        session = self._require_session()
        target = _parse_target(params)
        entries = session.enumerate_blocks(target)
        return {"target": params, "blocks": [entry_to_wire(e) for e in entries]}

    def _on_apply(self, params: dict):
        session = self._require_session()
        action = E.action_from_wire(params)
        outcome = session.apply(action)
        if not outcome.ok:
            raise BlockNotSelectable("", outcome.reason_class or outcome.error_kind,
                                     outcome.message)
        result = {"applied": E.action_to_wire(action)}
        if outcome.children_preserved is not None:
            result["children_preserved"] = outcome.children_preserved
        return result

    def _on_undo(self, params: dict):
        self._require_session().undo()
        return {"undone": True}

    def _on_redo(self, params: dict):
        self._require_session().redo()
        return {"redone": True}

    def _on_print(self, params: dict):
        session = self._require_session()
        options = P.PrintOptions(
            allow_holes=bool(params.get("allow_holes", True)),
            paren_policy=str(params.get("paren_policy", "minimal")),
        )
        return {"text": P.print_model(session.model, options)}

    def _on_constraints(self, params: dict):
        session = self._require_session()
        hole_id = int(params["hole"])
        pred = session.model.pred_of_node(hole_id)
        constraint = T.derive_constraint(session.ctx, pred.body, hole_id)
        return {"hole": hole_id, "constraint": constraint_to_wire(constraint)}


def _error_response(rid, code: str, message: str, reason_class: str = "") -> dict:
    err = {"code": code, "message": message}
    if reason_class:
        err["reason_class"] = reason_class
    return {"id": rid, "ok": False, "error": err}


# ---------------------------------------------------------------------------
# Transports
# ---------------------------------------------------------------------------

def serve_stdio(stdin: BinaryIO | None = None, stdout: BinaryIO | None = None) -> None:
    """Newline-delimited JSON over stdio; one session; runs until EOF."""
    stdin = stdin or sys.stdin.buffer
    stdout = stdout or sys.stdout.buffer

    def send(obj: dict):
        stdout.write(json.dumps(obj).encode("utf-8") + b"\n")
        stdout.flush()

    send(hello_message())
    session = ProtocolSession()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        send(session.handle_line(line))


def _read_frame(sock: socket.socket) -> bytes | None:
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length > 64 * 1024 * 1024:
        raise EngineError("frame too large")
    return _read_exact(sock, length)


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def _send_frame(sock: socket.socket, obj: dict):
    payload = json.dumps(obj).encode("utf-8")
    sock.sendall(struct.pack(">I", len(payload)) + payload)


class _SocketHandler(socketserver.BaseRequestHandler):
    def handle(self):
        _send_frame(self.request, hello_message())
        session = ProtocolSession()
        while True:
            try:
                frame = _read_frame(self.request)
            except (OSError, EngineError):
                return
            if frame is None:
                return
            try:
                _send_frame(self.request, session.handle_line(frame))
            except OSError:
                return


class _ThreadedUnixServer(socketserver.ThreadingMixIn, socketserver.UnixStreamServer):
    daemon_threads = True
    allow_reuse_address = True


def serve_socket(path: str) -> "_ThreadedUnixServer":
    """Length-prefixed JSON frames over a unix socket; one session per
    connection, sessions fully independent."""
    server = _ThreadedUnixServer(path, _SocketHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
