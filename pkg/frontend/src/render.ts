// Canvas drawing: world scene (arm linkage, obstacle disc with its
// activation ring, goal marker, force arrow) and the side panel (tank
// bar with floor line, barrier sparklines, slack indicators). All
// physical quantities are labeled with units.

import { ViewStore } from './view.js';

export interface WorldTransform {
  originPx: [number, number];
  pxPerM: number;
}

/** Fixed world-to-screen scale from the scenario's reach bounding box. */
export function worldTransform(
  reachM: number,
  widthPx: number,
  heightPx: number,
): WorldTransform {
  const half = reachM + 0.5; // margin for obstacle/goal excursions
  const pxPerM = Math.min(widthPx, heightPx) / (2 * half);
  return { originPx: [widthPx / 2, heightPx / 2], pxPerM };
}

export function toScreen(t: WorldTransform, p: number[]): [number, number] {
  return [t.originPx[0] + p[0] * t.pxPerM, t.originPx[1] - p[1] * t.pxPerM];
}

export function toWorld(t: WorldTransform, px: number, py: number): number[] {
  return [(px - t.originPx[0]) / t.pxPerM, (t.originPx[1] - py) / t.pxPerM];
}

/** Planar arm joint positions from link lengths and joint angles. */
export function armPoints(linkLengthsM: number[], q: number[]): number[][] {
  const points: number[][] = [[0, 0]];
  let angle = 0;
  let x = 0;
  let y = 0;
  for (let i = 0; i < linkLengthsM.length; i++) {
    angle += q[i];
    x += linkLengthsM[i] * Math.cos(angle);
    y += linkLengthsM[i] * Math.sin(angle);
    points.push([x, y]);
  }
  return points;
}

function drawSparkline(
  ctx: CanvasRenderingContext2D,
  series: number[],
  x: number,
  y: number,
  w: number,
  h: number,
  color: string,
  label: string,
): void {
  ctx.strokeStyle = '#394152';
  ctx.strokeRect(x, y, w, h);
  ctx.fillStyle = '#9aa4b2';
  ctx.font = '11px monospace';
  ctx.fillText(label, x + 4, y + 12);
  if (series.length < 2) return;
  let lo = Math.min(...series, 0);
  let hi = Math.max(...series, 0);
  if (hi - lo < 1e-9) {
    hi += 1;
    lo -= 1;
  }
  const toY = (v: number) => y + h - ((v - lo) / (hi - lo)) * h;
  // zero line
  ctx.strokeStyle = '#4a5568';
  ctx.beginPath();
  ctx.moveTo(x, toY(0));
  ctx.lineTo(x + w, toY(0));
  ctx.stroke();
  ctx.strokeStyle = color;
  ctx.beginPath();
  series.forEach((v, i) => {
    const px = x + (i / (series.length - 1)) * w;
    if (i === 0) ctx.moveTo(px, toY(v));
    else ctx.lineTo(px, toY(v));
  });
  ctx.stroke();
  ctx.fillStyle = color;
  ctx.fillText(series[series.length - 1].toExponential(2), x + w - 74, y + 12);
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  store: ViewStore,
  transform: WorldTransform,
  widthPx: number,
  heightPx: number,
): void {
  const frame = store.frame;
  ctx.fillStyle = '#11151c';
  ctx.fillRect(0, 0, widthPx, heightPx);
  if (frame === null || store.hello === null) {
    ctx.fillStyle = '#9aa4b2';
    ctx.font = '14px sans-serif';
    ctx.fillText('waiting for state frames...', 20, 30);
    return;
  }
  const hello = store.hello;
  const dMin = hello.d_min_m;
  const dStar = hello.activation_distance_m;

  // obstacle disc and activation ring
  if (frame.x_obs !== null) {
    const [ox, oy] = toScreen(transform, frame.x_obs);
    if (dStar !== null) {
      const active =
        frame.obstacle_distance_m !== null && frame.obstacle_distance_m < dStar;
      ctx.strokeStyle = active ? '#f6ad55' : '#4a5568';
      ctx.setLineDash([6, 6]);
      ctx.lineWidth = active ? 2.5 : 1;
      ctx.beginPath();
      ctx.arc(ox, oy, dStar * transform.pxPerM, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.lineWidth = 1;
    }
    ctx.fillStyle = '#e53e3e66';
    ctx.strokeStyle = '#e53e3e';
    ctx.beginPath();
    ctx.arc(ox, oy, (dMin ?? 0.05) * transform.pxPerM, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
  }

  // goal marker
  if (frame.x_goal !== null) {
    const [gx, gy] = toScreen(transform, frame.x_goal);
    ctx.strokeStyle = '#48bb78';
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(gx - 8, gy);
    ctx.lineTo(gx + 8, gy);
    ctx.moveTo(gx, gy - 8);
    ctx.lineTo(gx, gy + 8);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(gx, gy, 5, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.lineWidth = 1;
  }

  // arm linkage
  const lengths = hello.robot.link_lengths_m;
  if (lengths !== undefined) {
    const points = armPoints(lengths, frame.q).map((p) => toScreen(transform, p));
    ctx.strokeStyle = '#a0aec0';
    ctx.lineWidth = 5;
    ctx.lineCap = 'round';
    ctx.beginPath();
    points.forEach(([px, py], i) => {
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
    ctx.lineWidth = 1;
    ctx.fillStyle = '#718096';
    for (const [px, py] of points.slice(0, -1)) {
      ctx.beginPath();
      ctx.arc(px, py, 5, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  // end-effector + force arrow
  const [ex, ey] = toScreen(transform, frame.x);
  ctx.fillStyle = '#63b3ed';
  ctx.beginPath();
  ctx.arc(ex, ey, 7, 0, 2 * Math.PI);
  ctx.fill();
  const forceNorm = Math.hypot(...frame.f_e);
  if (forceNorm > 1e-6) {
    const arrowScale = 30; // px per newton
    const fx = ex + frame.f_e[0] * arrowScale;
    const fy = ey - frame.f_e[1] * arrowScale;
    ctx.strokeStyle = '#f6e05e';
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(ex, ey);
    ctx.lineTo(fx, fy);
    ctx.stroke();
    ctx.lineWidth = 1;
    ctx.fillStyle = '#f6e05e';
    ctx.font = '11px monospace';
    ctx.fillText(`${forceNorm.toFixed(2)} N`, fx + 6, fy);
  }

  if (frame.paused) {
    ctx.fillStyle = '#f6ad55';
    ctx.font = 'bold 16px sans-serif';
    ctx.fillText('PAUSED', 20, 30);
  }
  if (store.isStale()) {
    ctx.fillStyle = '#fc8181';
    ctx.font = 'bold 16px sans-serif';
    ctx.fillText('STALE (disconnected)', 20, 52);
  }
  if (frame.fault) {
    ctx.fillStyle = '#fc8181';
    ctx.font = 'bold 14px sans-serif';
    ctx.fillText(`fault: ${frame.fault}`, 20, heightPx - 16);
  }
}

export function renderPanel(
  ctx: CanvasRenderingContext2D,
  store: ViewStore,
  widthPx: number,
  heightPx: number,
): void {
  ctx.fillStyle = '#161b24';
  ctx.fillRect(0, 0, widthPx, heightPx);
  const frame = store.frame;
  if (frame === null) return;

  // tank-energy bar with the reserve floor line
  const barX = 20;
  const barY = 30;
  const barH = heightPx - 120;
  const barW = 34;
  const tankMax = Math.max(frame.tank_energy_j * 1.25, frame.tank_floor_j * 4, 0.5);
  const level = Math.min(1, frame.tank_energy_j / tankMax);
  const floorLevel = frame.tank_floor_j / tankMax;
  const atFloor = frame.tank_energy_j <= frame.tank_floor_j * 1.02;
  ctx.strokeStyle = '#394152';
  ctx.strokeRect(barX, barY, barW, barH);
  ctx.fillStyle = atFloor ? '#fc8181' : '#4fd1c5';
  ctx.fillRect(barX, barY + barH * (1 - level), barW, barH * level);
  const floorY = barY + barH * (1 - floorLevel);
  ctx.strokeStyle = atFloor ? '#fff5f5' : '#f6ad55';
  ctx.lineWidth = atFloor ? 3 : 2;
  ctx.beginPath();
  ctx.moveTo(barX - 6, floorY);
  ctx.lineTo(barX + barW + 6, floorY);
  ctx.stroke();
  ctx.lineWidth = 1;
  ctx.fillStyle = '#9aa4b2';
  ctx.font = '11px monospace';
  ctx.fillText('tank', barX, barY - 14);
  ctx.fillText(`${frame.tank_energy_j.toFixed(3)} J`, barX, barY - 2);
  ctx.fillText(`floor ${frame.tank_floor_j.toFixed(2)} J`, barX + barW + 10, floorY + 4);

  // sparklines: goal and clearance barriers when present
  const sparkX = barX + barW + 86;
  const sparkW = widthPx - sparkX - 16;
  let sparkY = 24;
  for (const name of ['position_goal', 'obstacle']) {
    const series = store.histories.get(name);
    if (series === undefined) continue;
    drawSparkline(
      ctx,
      series,
      sparkX,
      sparkY,
      sparkW,
      54,
      name === 'obstacle' ? '#f6ad55' : '#63b3ed',
      name === 'obstacle' ? 'h_safe' : 'h_pos',
    );
    sparkY += 66;
  }
  if (frame.obstacle_distance_m !== null) {
    ctx.fillStyle = '#9aa4b2';
    ctx.fillText(`d = ${frame.obstacle_distance_m.toFixed(3)} m`, sparkX, sparkY + 10);
    sparkY += 22;
  }

  // slack indicators: one dot per task, intensity follows |delta|
  ctx.fillStyle = '#9aa4b2';
  ctx.fillText('slacks', sparkX, sparkY + 12);
  frame.task_names.forEach((name, i) => {
    const slack = Math.abs(frame.task_slack[i]);
    const intensity = Math.min(1, slack / 0.5);
    const y = sparkY + 26 + i * 16;
    ctx.fillStyle = `rgba(252, 129, 129, ${0.15 + 0.85 * intensity})`;
    ctx.beginPath();
    ctx.arc(sparkX + 6, y - 4, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = '#9aa4b2';
    ctx.fillText(`${name}  ${slack.toExponential(1)}`, sparkX + 18, y);
  });
}
