"""Drive a live workbench server: edit, attack, stream, revert.

Starts the HTTP server on an ephemeral port, then walks the same path a
dashboard client takes: create a session from text, swap a word by hand,
run the attack while reading the event stream, and revert.
"""

import json
import socket
import threading

import httpx
import uvicorn

from advtext.server import create_app

with socket.socket() as probe:
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]

server = uvicorn.Server(uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="warning"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    pass

base = f"http://127.0.0.1:{port}"
with httpx.Client(base_url=base, timeout=10.0) as client:
    session = client.post("/sessions", json={
        "text": "the movie was bad",
        "config": {"tau": 2.5, "population_size": 8, "k_neighbors": 5, "seed": 3,
                   "conditions": [{"type": "score_threshold", "theta": 0.0}]},
    }).json()
    sid = session["id"]
    print(f"session {sid}: score {session['score']:+.2f}  {session['text']!r}")

    # a manual swap locks the position so the attack cannot undo it
    state = client.post(f"/sessions/{sid}/swap", json={"pos": 1, "word": "film"}).json()
    print(f"after swap: {state['text']!r}  locks {state['locks']}")

    client.post(f"/sessions/{sid}/attack")
    with client.stream("GET", f"/sessions/{sid}/stream", params={"from": 0}) as stream:
        for line in stream.iter_lines():
            if not line.strip():
                continue
            event = json.loads(line)
            print(f"  [{event['type']:>10}] seq {event['seq']}  score {event.get('score', 0):+.2f}  "
                  f"{event.get('description', '')}")
            if event["type"] == "stopped":
                break

    state = client.post(f"/sessions/{sid}/revert", json={"seq": 0}).json()
    print(f"reverted: {state['text']!r}  swaps {state['swap_count']}")

server.should_exit = True
