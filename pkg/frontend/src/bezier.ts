// Display-side curve evaluation. Solving happens on the server; the studio
// only needs point queries for ghost curves and the midpoint marker.

/** de Casteljau evaluation of a control polygon at parameter t in [0, 1]. */
export function evalCurve(points: readonly number[][], t: number): number[] {
  if (points.length === 0) throw new Error("empty control polygon");
  let layer = points.map((p) => [...p]);
  while (layer.length > 1) {
    const next: number[][] = [];
    for (let i = 0; i + 1 < layer.length; i++) {
      const a = layer[i]!;
      const b = layer[i + 1]!;
      next.push(a.map((c, k) => (1 - t) * c + t * b[k]!));
    }
    layer = next;
  }
  return layer[0]!;
}

export function samplePolyline(points: readonly number[][], samples: number): number[][] {
  const out: number[][] = [];
  for (let s = 0; s <= samples; s++) out.push(evalCurve(points, s / samples));
  return out;
}

export function distance(a: readonly number[], b: readonly number[]): number {
  let sq = 0;
  for (let c = 0; c < a.length; c++) sq += (a[c]! - b[c]!) ** 2;
  return Math.sqrt(sq);
}
