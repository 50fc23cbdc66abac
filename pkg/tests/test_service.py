"""The JSON protocol: request handling, state payloads, fuzzing, framing."""
import json
import os
import socket
import tempfile

import pytest

from alloyblocks import service as S
from alloyblocks.editing import EditSession
from alloyblocks import parse_model

from conftest import TRASH_EMPTY_TEXT, TRASH_TEXT


@pytest.fixture
def proto():
    p = S.ProtocolSession()
    resp = p.handle({"id": 0, "method": "load", "params": {"text": TRASH_EMPTY_TEXT}})
    assert resp["ok"], resp
    return p


def call(proto, rid, method, **params):
    return proto.handle({"id": rid, "method": method, "params": params})


def test_hello_shape():
    hello = S.hello_message()
    assert hello["protocol"] == 1
    assert "blocks" in hello["capabilities"] and "apply" in hello["capabilities"]


def test_load_and_state(proto):
    resp = call(proto, 1, "state")
    assert resp["ok"] and resp["id"] == 1
    state = resp["result"]
    assert [p["name"] for p in state["preds"]] == ["inv5", "inv10"]
    inv5 = state["preds"][0]
    assert inv5["tree"]["form"] == "Hole"
    assert inv5["tree"]["shape"] == "squared"
    assert inv5["tree"]["hole"]["label"] == "formula"


def test_blocks_response_grayed_link(proto):
    # x !in (?) context: build it first
    for i, (method, params) in enumerate([
        ("apply", {"action": "insert", "hole": 0, "block": "quant:all"}),
        ("apply", {"action": "insert", "hole": 3, "block": "set:File"}),
        ("apply", {"action": "insert", "hole": 4, "block": "op:!in"}),
        ("apply", {"action": "insert", "hole": 7, "block": "set:x"}),
    ]):
        resp = proto.handle({"id": 10 + i, "method": method, "params": params})
        assert resp["ok"], resp
    resp = call(proto, 20, "blocks", hole=8)
    assert resp["ok"]
    rows = {b["key"]: b for b in resp["result"]["blocks"]}
    assert rows["set:link"]["status"] == "Grayed"
    assert rows["set:link"]["reason_class"] == "ArityMismatch"
    assert rows["set:Protected"]["status"] == "Selectable"
    assert rows["op:->"]["reason_class"] == "ArityMismatch"


def test_apply_rejection_carries_reason(proto):
    resp = call(proto, 1, "apply", action="insert", hole=0, block="set:File")
    assert not resp["ok"]
    assert resp["error"]["reason_class"] == "KindMismatch"
    assert resp["error"]["code"] == "rejected"


def test_anchor_blocks_and_apply(proto):
    call(proto, 1, "apply", action="insert", hole=1, block="op:always")
    call(proto, 2, "apply", action="insert", hole=3, block="op:=")
    call(proto, 3, "apply", action="insert", hole=5, block="set:Protected")
    call(proto, 4, "apply", action="insert", hole=6, block="set:Protected")
    resp = call(proto, 5, "blocks", anchor=8, side="right")
    assert resp["ok"]
    rows = {b["key"]: b for b in resp["result"]["blocks"]}
    assert rows["op:'"]["status"] == "Selectable"
    resp = call(proto, 6, "apply", action="extend", node=8, side="right", block="op:'")
    assert resp["ok"]
    resp = call(proto, 7, "print")
    assert "always Protected = Protected'" in resp["result"]["text"]


def test_undo_redo_methods(proto):
    call(proto, 1, "apply", action="insert", hole=0, block="quant:all")
    assert call(proto, 2, "undo")["ok"]
    state = call(proto, 3, "state")["result"]
    assert state["preds"][0]["tree"]["form"] == "Hole"
    assert call(proto, 4, "redo")["ok"]
    state = call(proto, 5, "state")["result"]
    assert state["preds"][0]["tree"]["form"] == "Quant"


def test_print_no_holes_fails_structured(proto):
    resp = call(proto, 1, "print", allow_holes=False)
    assert not resp["ok"]
    assert resp["error"]["code"] == "holes_present"


def test_constraints_method(proto):
    call(proto, 1, "apply", action="insert", hole=0, block="quant:all")
    call(proto, 2, "apply", action="insert", hole=3, block="set:File")
    call(proto, 3, "apply", action="insert", hole=4, block="op:!in")
    call(proto, 4, "apply", action="insert", hole=7, block="set:x")
    resp = call(proto, 5, "constraints", hole=8)
    assert resp["ok"]
    c = resp["result"]["constraint"]
    assert c["kind_class"] == "expr"
    assert c["arities"] == [1]
    assert c["overlap"]["1"] == ["{this/File}"]


def test_unknown_method(proto):
    resp = proto.handle({"id": 9, "method": "teleport", "params": {}})
    assert not resp["ok"]
    assert resp["error"]["code"] == "unknown_method"


def test_state_payload_has_anchors_and_labels(proto):
    call(proto, 1, "apply", action="insert", hole=0, block="quant:all")
    tree = call(proto, 2, "state")["result"]["preds"][0]["tree"]
    assert tree["form"] == "Quant" and tree["anchors"] == ["left", "right"]
    domain, body = tree["children"]
    assert domain["hole"]["label"] == "domain"
    assert body["hole"]["label"] == "subformula"
    assert domain["shape"] == "rounded" and body["shape"] == "squared"
    assert "anchors" not in domain  # holes expose no anchors


def test_protocol_fuzzing_never_crashes():
    p = S.ProtocolSession()
    frames = [
        "not json at all",
        "[]",
        '{"id": "x", "method": "state"}',
        '{"method": "state"}',
        '{"id": 1}',
        '{"id": 1, "method": "state"}',  # no model loaded yet
        '{"id": 2, "method": "load", "params": {"text": "sig {{{"}}',
        '{"id": 3, "method": "load", "params": {"text": "pred p { some Ghost }"}}',
        '{"id": 4, "method": "load", "params": 7}',
        '{"id": 5, "method": "apply", "params": {"action": "insert"}}',
        '{"id": 6, "method": "blocks", "params": {"hole": 99999}}',
        '{"id": 7, "method": "blocks", "params": {}}',
        '{"id": 8, "method": "apply", "params": {"action": "insert", "hole": -3, "block": 5}}',
        '{"id": 9, "method": "constraints", "params": {"hole": "zzz"}}',
        '{"id": 10, "method": "undo", "params": {}}',
    ]
    for frame in frames:
        resp = p.handle_line(frame)
        assert resp["ok"] is False
        assert "code" in resp["error"] and "message" in resp["error"]


def test_stale_node_ids_after_edit(proto):
    call(proto, 1, "apply", action="insert", hole=0, block="quant:all")
    call(proto, 2, "apply", action="insert", hole=3, block="set:File")
    # hole 3 was consumed; using it again is an error, not a crash
    resp = call(proto, 3, "apply", action="insert", hole=3, block="set:File")
    assert not resp["ok"]
    resp = call(proto, 4, "blocks", hole=3)
    assert not resp["ok"]


def test_cli_and_protocol_share_palette(proto, tmp_path):
    # identical (model, hole) must produce identical palette contents
    wire = call(proto, 1, "blocks", hole=0)["result"]["blocks"]
    session = EditSession(parse_model(TRASH_EMPTY_TEXT))
    direct = [S.entry_to_wire(e) for e in session.enumerate_blocks(0)]
    assert wire == direct


def test_socket_transport_round_trip(tmp_path):
    path = str(tmp_path / "svc.sock")
    server = S.serve_socket(path)
    try:
        with socket.socket(socket.AF_UNIX, socket.SOCK_STREAM) as sock:
            sock.connect(path)
            hello = json.loads(S._read_frame(sock))
            assert hello["protocol"] == 1
            S._send_frame(sock, {"id": 1, "method": "load",
                                 "params": {"text": TRASH_TEXT}})
            resp = json.loads(S._read_frame(sock))
            assert resp["ok"] and resp["result"]["preds"] == 2
            S._send_frame(sock, {"id": 2, "method": "print", "params": {}})
            resp = json.loads(S._read_frame(sock))
            assert "pred inv5" in resp["result"]["text"]
    finally:
        server.shutdown()


def test_two_socket_sessions_are_independent(tmp_path):
    path = str(tmp_path / "svc2.sock")
    server = S.serve_socket(path)
    try:
        a = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        b = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        a.connect(path)
        b.connect(path)
        json.loads(S._read_frame(a))
        json.loads(S._read_frame(b))
        S._send_frame(a, {"id": 1, "method": "load", "params": {"text": TRASH_TEXT}})
        assert json.loads(S._read_frame(a))["ok"]
        # session b never loaded anything
        S._send_frame(b, {"id": 1, "method": "state", "params": {}})
        resp = json.loads(S._read_frame(b))
        assert not resp["ok"]
        a.close()
        b.close()
    finally:
        server.shutdown()


def test_stdio_serve_loop():
    import io
    requests = b"\n".join([
        json.dumps({"id": 1, "method": "load", "params": {"text": TRASH_TEXT}}).encode(),
        b"garbage",
        json.dumps({"id": 2, "method": "print", "params": {}}).encode(),
    ]) + b"\n"
    stdin = io.BytesIO(requests)
    stdout = io.BytesIO()
    S.serve_stdio(stdin, stdout)
    lines = stdout.getvalue().decode().strip().splitlines()
    hello = json.loads(lines[0])
    assert hello["protocol"] == 1
    replies = [json.loads(l) for l in lines[1:]]
    assert replies[0]["ok"]
    assert replies[1]["ok"] is False  # garbage answered, not crashed
    assert replies[2]["ok"]
