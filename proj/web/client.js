// Copyright 2026 The Consensus Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bare wire client: draws the workspace, streams the cursor.
(() => {
  const canvas = document.getElementById("ws");
  const ctx = canvas.getContext("2d");
  const status = document.getElementById("status");
  const RED = [960, 80, 160, 120];
  const BLUE = [160, 80, 160, 120];
  let sock = null, arm = [640, 640], cursor = [640, 680], t0 = 0, running = false;

  function draw() {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#d33"; ctx.fillRect(...RED);
    ctx.fillStyle = "#36d"; ctx.fillRect(...BLUE);
    ctx.strokeStyle = "#999"; ctx.beginPath(); ctx.moveTo(0, 330); ctx.lineTo(1280, 330); ctx.stroke();
    ctx.fillStyle = "#444"; ctx.beginPath(); ctx.arc(arm[0], arm[1], 12, 0, 7); ctx.fill();
    ctx.fillStyle = "#0a0"; ctx.beginPath(); ctx.arc(cursor[0], cursor[1], 6, 0, 7); ctx.fill();
    requestAnimationFrame(draw);
  }

  function send(m) { if (sock && sock.readyState === 1) sock.send(JSON.stringify(m)); }

  function onMessage(ev) {
    const m = JSON.parse(ev.data);
    switch (m.type) {
      case "TrialStart":
        status.textContent = `trial ${m.index}`;
        running = true;
        break;
      case "Tick":
        arm = [m.arm_x, m.arm_y];
        break;
      case "TrialEnd":
        running = false;
        status.textContent = `${m.outcome} (${m.score_delta >= 0 ? "+" : ""}${m.score_delta})`;
        setTimeout(() => send({ type: "Ready" }), 1500);
        break;
      case "SessionEnd":
        status.textContent = `done, total ${m.total}`;
        break;
      case "Error":
        status.textContent = `error ${m.code}: ${m.msg}`;
        break;
    }
  }

  canvas.addEventListener("mousemove", (e) => {
    const r = canvas.getBoundingClientRect();
    cursor = [(e.clientX - r.left) * canvas.width / r.width, (e.clientY - r.top) * canvas.height / r.height];
    if (running) send({ type: "Cursor", t: (performance.now() - t0) / 1000, x: cursor[0], y: cursor[1] });
  });

  document.getElementById("go").onclick = () => {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    sock = new WebSocket(`${proto}://${location.host}/session`);
    t0 = performance.now();
    sock.onopen = () => {
      send({ type: "Hello", name: document.getElementById("name").value || "anon" });
      send({ type: "Ready" });
    };
    sock.onmessage = onMessage;
    sock.onclose = () => { running = false; status.textContent = "closed"; };
  };

  draw();
})();
