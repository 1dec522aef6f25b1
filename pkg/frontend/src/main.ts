// Operator console wiring: WebSocket intake, pointer-drag command entry,
// and the animation-frame render loop. Server address comes from the
// URL query (?host=...&port=...).

import { Command } from './protocol.js';
import { DEFAULT_SPRING, DragSession, Mode } from './spring.js';
import { renderPanel, renderScene, toScreen, toWorld, worldTransform } from './render.js';
import { ViewStore } from './view.js';

const params = new URLSearchParams(window.location.search);
const host = params.get('host') ?? window.location.hostname ?? '127.0.0.1';
const port = params.get('port') ?? '8765';
const url = `ws://${host}:${port}/ws`;

const scene = document.getElementById('scene') as HTMLCanvasElement;
const panel = document.getElementById('panel') as HTMLCanvasElement;
const statusLine = document.getElementById('status') as HTMLElement;
const modeButtons = Array.from(
  document.querySelectorAll<HTMLButtonElement>('button[data-mode]'),
);

const store = new ViewStore();
let mode: Mode = 'drag-force';
let drag: DragSession | null = null;
let socket: WebSocket | null = null;

function send(command: Command): void {
  if (socket !== null && socket.readyState === WebSocket.OPEN) {
    socket.send(JSON.stringify(command));
  }
}

function connect(): void {
  store.status = 'connecting';
  const ws = new WebSocket(url);
  socket = ws;
  ws.onopen = () => {
    store.status = 'connected';
  };
  ws.onmessage = (event: MessageEvent) => {
    try {
      store.ingest(JSON.parse(event.data as string));
    } catch {
      store.stats.droppedInvalid += 1;
    }
  };
  ws.onclose = () => {
    store.status = 'disconnected';
    drag = null;
    setTimeout(connect, 1000); // steady reconnect
  };
  ws.onerror = () => ws.close();
}

function setMode(next: Mode): void {
  mode = next;
  for (const button of modeButtons) {
    button.classList.toggle('active', button.dataset.mode === mode);
  }
}

for (const button of modeButtons) {
  button.addEventListener('click', () => setMode(button.dataset.mode as Mode));
}
(document.getElementById('pause') as HTMLButtonElement).onclick = () =>
  send({ type: 'pause' });
(document.getElementById('resume') as HTMLButtonElement).onclick = () =>
  send({ type: 'resume' });
(document.getElementById('reset') as HTMLButtonElement).onclick = () =>
  send({ type: 'reset' });

function reachOf(): number {
  const lengths = store.hello?.robot.link_lengths_m;
  return lengths !== undefined ? lengths.reduce((a, b) => a + b, 0) : 1.0;
}

function pointerWorld(event: PointerEvent): number[] {
  const rect = scene.getBoundingClientRect();
  const transform = worldTransform(reachOf(), scene.width, scene.height);
  return toWorld(transform, event.clientX - rect.left, event.clientY - rect.top);
}

scene.addEventListener('pointerdown', (event) => {
  if (store.status !== 'connected' || store.frame === null) return;
  scene.setPointerCapture(event.pointerId);
  drag = new DragSession(mode, send, DEFAULT_SPRING);
  drag.move(pointerWorld(event), store.frame.x, performance.now());
});

scene.addEventListener('pointermove', (event) => {
  if (drag === null || store.frame === null) return;
  drag.move(pointerWorld(event), store.frame.x, performance.now());
});

function endDrag(event: PointerEvent): void {
  if (drag === null) return;
  const ee = store.frame !== null ? store.frame.x : [0, 0];
  drag.release(pointerWorld(event), ee);
  drag = null;
}
scene.addEventListener('pointerup', endDrag);
scene.addEventListener('pointercancel', endDrag);

function statusText(): string {
  const stats = store.stats;
  const drop = (store.dropRatio() * 100).toFixed(2);
  const t = store.frame !== null ? store.frame.t_sim.toFixed(2) : '-';
  return (
    `${store.status} | t_sim ${t} s | frames ${stats.accepted} ` +
    `(drop ${drop}%) | mode ${mode}`
  );
}

function tick(): void {
  const sceneCtx = scene.getContext('2d');
  const panelCtx = panel.getContext('2d');
  if (sceneCtx !== null && panelCtx !== null) {
    const transform = worldTransform(reachOf(), scene.width, scene.height);
    renderScene(sceneCtx, store, transform, scene.width, scene.height);
    renderPanel(panelCtx, store, panel.width, panel.height);
    // drag affordance: ring around the end-effector while force mode
    if (mode === 'drag-force' && store.frame !== null) {
      const [ex, ey] = toScreen(transform, store.frame.x);
      sceneCtx.strokeStyle = '#63b3ed55';
      sceneCtx.beginPath();
      sceneCtx.arc(ex, ey, 16, 0, 2 * Math.PI);
      sceneCtx.stroke();
    }
    store.markRender();
  }
  statusLine.textContent = statusText();
  requestAnimationFrame(tick);
}

setMode('drag-force');
connect();
requestAnimationFrame(tick);
