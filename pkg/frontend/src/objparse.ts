// Minimal OBJ reader for what the service emits: o / v / f / l records,
// triangular faces, 1-based global vertex indices.

export interface ObjObject {
  name: string;
  /** Range into the global vertex list; each object's vertices are contiguous. */
  vertexStart: number;
  vertexCount: number;
  faces: [number, number, number][];
  lines: number[][];
}

export interface ObjModel {
  vertices: number[][];
  objects: ObjObject[];
}

export function parseObj(text: string): ObjModel {
  const vertices: number[][] = [];
  const objects: ObjObject[] = [];
  let current: ObjObject | null = null;

  const open = (name: string): ObjObject => {
    const object = { name, vertexStart: vertices.length, vertexCount: 0, faces: [], lines: [] };
    objects.push(object);
    return object;
  };

  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "" || line.startsWith("#")) continue;
    const [tag, ...rest] = line.split(/\s+/);
    switch (tag) {
      case "o":
        current = open(rest.join(" "));
        break;
      case "v": {
        if (!current) current = open("");
        vertices.push(rest.map(Number));
        current.vertexCount += 1;
        break;
      }
      case "f": {
        if (!current || rest.length !== 3) throw new Error(`unsupported face: ${line}`);
        const [a, b, c] = rest.map((part) => Number(part.split("/")[0]) - 1);
        current.faces.push([a!, b!, c!]);
        break;
      }
      case "l": {
        if (!current) throw new Error(`polyline before any object: ${line}`);
        current.lines.push(rest.map((part) => Number(part) - 1));
        break;
      }
      default:
        break; // ignore records we do not produce
    }
  }
  if (vertices.some((v) => v.some((c) => !Number.isFinite(c)))) {
    throw new Error("non-finite vertex coordinate");
  }
  return { vertices, objects };
}

export function findObject(model: ObjModel, name: string): ObjObject {
  const object = model.objects.find((o) => o.name === name);
  if (!object) throw new Error(`no object ${JSON.stringify(name)} in mesh`);
  return object;
}

export function objectVertices(model: ObjModel, name: string): number[][] {
  const object = findObject(model, name);
  return model.vertices.slice(object.vertexStart, object.vertexStart + object.vertexCount);
}

/** Largest pointwise Euclidean distance between two equally long vertex lists. */
export function maxDisplacement(a: number[][], b: number[][]): number {
  if (a.length !== b.length) throw new Error(`vertex count changed: ${a.length} vs ${b.length}`);
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    const p = a[i]!;
    const q = b[i]!;
    let sq = 0;
    for (let c = 0; c < p.length; c++) sq += (p[c]! - q[c]!) ** 2;
    worst = Math.max(worst, Math.sqrt(sq));
  }
  return worst;
}
