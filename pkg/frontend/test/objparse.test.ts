import { describe, expect, it } from "vitest";

import { findObject, maxDisplacement, objectVertices, parseObj } from "../src/objparse.js";
import { api, solvedSession } from "./helpers.js";

const TINY = `
o tri
v 0 0 0
v 1 0 0
v 0 1 0
f 1 2 3
o path
v 5 5 5
v 6 6 6
l 4 5
`;

describe("obj text parsing", () => {
  it("splits objects and keeps global vertex indexing", () => {
    const model = parseObj(TINY);
    expect(model.vertices).toHaveLength(5);
    expect(model.objects.map((o) => o.name)).toEqual(["tri", "path"]);

    const tri = findObject(model, "tri");
    expect(tri.faces).toEqual([[0, 1, 2]]);
    expect(objectVertices(model, "tri")).toEqual([
      [0, 0, 0],
      [1, 0, 0],
      [0, 1, 0],
    ]);

    const path = findObject(model, "path");
    expect(path.lines).toEqual([[3, 4]]);
    expect(objectVertices(model, "path")).toEqual([
      [5, 5, 5],
      [6, 6, 6],
    ]);
  });

  it("rejects non-triangular faces and unknown object lookups", () => {
    expect(() => parseObj("o x\nv 0 0 0\nf 1 1 1 1\n")).toThrow(/unsupported face/);
    expect(() => findObject(parseObj(TINY), "nope")).toThrow(/no object/);
  });

  it("measures displacement pointwise", () => {
    expect(maxDisplacement([[0, 0, 0]], [[3, 4, 0]])).toBeCloseTo(5, 12);
    expect(() => maxDisplacement([[0, 0, 0]], [])).toThrow(/vertex count/);
  });
});

describe("service mesh output", () => {
  it("has the advertised grid structure", async () => {
    const session = await solvedSession("presc_boundary_n4");
    const samples = 6;
    const model = parseObj(await api().getMesh(session.id, samples));

    const surface = findObject(model, "surface");
    expect(surface.vertexCount).toBe((samples + 1) ** 2);
    expect(surface.faces).toHaveLength(2 * samples * samples);

    // Diagonal polylines are sampled along the same parameter count.
    for (const name of ["diagonal_main", "diagonal_cross"]) {
      const diagonal = findObject(model, name);
      expect(diagonal.vertexCount).toBe(samples + 1);
      expect(diagonal.lines).toHaveLength(1);
      expect(diagonal.lines[0]).toHaveLength(samples + 1);
    }

    // Every face index points into the surface's own vertex range.
    for (const face of surface.faces) {
      for (const index of face) {
        expect(index).toBeGreaterThanOrEqual(surface.vertexStart);
        expect(index).toBeLessThan(surface.vertexStart + surface.vertexCount);
      }
    }
  });

  it("the main diagonal polyline lies on the surface's u=v line", async () => {
    const session = await solvedSession("presc_boundary_n4");
    const samples = 8;
    const model = parseObj(await api().getMesh(session.id, samples));
    const surface = objectVertices(model, "surface");
    const diagonal = objectVertices(model, "diagonal_main");

    // Surface vertices come row-major over an (samples+1)^2 grid, so the
    // u=v entries sit at stride samples+2.
    for (let s = 0; s <= samples; s++) {
      const onSurface = surface[s * (samples + 2)]!;
      const onCurve = diagonal[s]!;
      expect(maxDisplacement([onSurface], [onCurve])).toBeLessThan(1e-9);
    }
  });
});
