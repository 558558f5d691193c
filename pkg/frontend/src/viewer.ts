// Scene assembly: parsed service output in, a named THREE.Group out.
// No WebGL context is touched here, so everything is testable headless.

import * as THREE from "three";

import { Slot, slotKey } from "./api.js";
import { samplePolyline } from "./bezier.js";
import { ObjModel, findObject } from "./objparse.js";
import * as palette from "./palette.js";
import { HandleView, PairView } from "./store.js";

export interface SceneInputs {
  mesh: ObjModel | null;
  /** Realized control net points, (n+1) x (n+1) x d. */
  net: number[][][] | null;
  handles: HandleView[];
  selected: Slot | null;
  pair: PairView | null;
  ghost: PairView | null;
}

const GHOST_SAMPLES = 64;

function positionsOf(points: readonly number[][]): Float32Array {
  const out = new Float32Array(points.length * 3);
  points.forEach((p, i) => out.set([p[0] ?? 0, p[1] ?? 0, p[2] ?? 0], i * 3));
  return out;
}

function lineFrom(points: readonly number[][], color: number, name: string): THREE.Line {
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute("position", new THREE.BufferAttribute(positionsOf(points), 3));
  const line = new THREE.Line(geometry, new THREE.LineBasicMaterial({ color }));
  line.name = name;
  return line;
}

export function surfaceMesh(model: ObjModel): THREE.Mesh {
  const object = findObject(model, "surface");
  const verts = model.vertices.slice(object.vertexStart, object.vertexStart + object.vertexCount);
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute("position", new THREE.BufferAttribute(positionsOf(verts), 3));
  geometry.setIndex(object.faces.flatMap((f) => [f[0] - object.vertexStart, f[1] - object.vertexStart, f[2] - object.vertexStart]));
  geometry.computeVertexNormals();
  const mesh = new THREE.Mesh(
    geometry,
    new THREE.MeshStandardMaterial({ color: palette.SURFACE, side: THREE.DoubleSide }),
  );
  mesh.name = "surface";
  return mesh;
}

export function diagonalLines(model: ObjModel): THREE.Line[] {
  const out: THREE.Line[] = [];
  for (const name of ["diagonal_main", "diagonal_cross"]) {
    const object = model.objects.find((o) => o.name === name);
    if (!object) continue;
    for (const indices of object.lines) {
      out.push(lineFrom(indices.map((i) => model.vertices[i]!), palette.DIAGONAL, name));
    }
  }
  return out;
}

/** Grid wireframe of the control net. */
export function netLines(net: number[][][]): THREE.LineSegments {
  const segments: number[][] = [];
  const rows = net.length;
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < rows; j++) {
      if (j + 1 < rows) segments.push(net[i]![j]!, net[i]![j + 1]!);
      if (i + 1 < rows) segments.push(net[i]![j]!, net[i + 1]![j]!);
    }
  }
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute("position", new THREE.BufferAttribute(positionsOf(segments), 3));
  const lines = new THREE.LineSegments(geometry, new THREE.LineBasicMaterial({ color: palette.NET }));
  lines.name = "net";
  return lines;
}

export function netPoints(net: number[][][], scale: number): THREE.Points {
  const flat = net.flat();
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute("position", new THREE.BufferAttribute(positionsOf(flat), 3));
  const points = new THREE.Points(
    geometry,
    new THREE.PointsMaterial({ color: palette.NET, size: palette.NET_POINT_RADIUS * scale }),
  );
  points.name = "net_points";
  return points;
}

export function handleSpheres(
  handles: HandleView[],
  net: number[][][] | null,
  selected: Slot | null,
  scale: number,
): THREE.Group {
  const group = new THREE.Group();
  group.name = "handles";
  for (const handle of handles) {
    const [i, j] = handle.slot;
    const position = handle.value ?? net?.[i]?.[j] ?? null;
    if (!position) continue;
    const isSelected = selected !== null && slotKey(selected) === slotKey(handle.slot);
    const sphere = new THREE.Mesh(
      new THREE.SphereGeometry(palette.HANDLE_RADIUS * scale, 16, 12),
      new THREE.MeshStandardMaterial({
        color: isSelected ? palette.HANDLE_SELECTED : palette.HANDLE,
        transparent: handle.pending,
        opacity: handle.pending ? 0.6 : 1,
      }),
    );
    sphere.name = `handle:${slotKey(handle.slot)}`;
    sphere.position.set(position[0] ?? 0, position[1] ?? 0, position[2] ?? 0);
    group.add(sphere);
  }
  return group;
}

export function ghostLines(ghost: PairView): THREE.Group {
  const group = new THREE.Group();
  group.name = "ghost";
  for (const [name, polygon] of [
    ["ghost_main", ghost.q],
    ["ghost_cross", ghost.r],
  ] as const) {
    const line = lineFrom(samplePolyline(polygon, GHOST_SAMPLES), palette.GHOST, name);
    (line.material as THREE.LineBasicMaterial).transparent = true;
    (line.material as THREE.LineBasicMaterial).opacity = 0.5;
    group.add(line);
  }
  return group;
}

export function modelScale(net: number[][][] | null, mesh: ObjModel | null): number {
  const points = net ? net.flat() : mesh ? mesh.vertices : [];
  if (points.length === 0) return 1;
  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  for (const p of points) {
    for (let c = 0; c < 3; c++) {
      lo[c] = Math.min(lo[c]!, p[c] ?? 0);
      hi[c] = Math.max(hi[c]!, p[c] ?? 0);
    }
  }
  const diagonal = Math.hypot(hi[0]! - lo[0]!, hi[1]! - lo[1]!, hi[2]! - lo[2]!);
  return diagonal > 0 ? diagonal : 1;
}

export function buildSceneGraph(inputs: SceneInputs): THREE.Group {
  const root = new THREE.Group();
  root.name = "studio";
  const scale = modelScale(inputs.net, inputs.mesh);
  if (inputs.mesh) {
    root.add(surfaceMesh(inputs.mesh));
    for (const line of diagonalLines(inputs.mesh)) root.add(line);
  }
  if (inputs.net) {
    root.add(netLines(inputs.net));
    root.add(netPoints(inputs.net, scale));
  }
  root.add(handleSpheres(inputs.handles, inputs.net, inputs.selected, scale));
  if (inputs.ghost) root.add(ghostLines(inputs.ghost));
  return root;
}
