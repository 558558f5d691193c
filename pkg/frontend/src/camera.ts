// Orbit rig: the camera sits on a sphere around a target point, y up.
// Pure math so gestures can be tested without a renderer.

export type Vec3 = [number, number, number];

const TWO_PI = Math.PI * 2;
// Keep the polar angle off the poles so the up vector never degenerates.
const PHI_MIN = 0.02;
const PHI_MAX = Math.PI - 0.02;

export class OrbitRig {
  target: Vec3;
  radius: number;
  /** Azimuth around y, radians. */
  theta: number;
  /** Polar angle from +y, radians, clamped to (0, pi). */
  phi: number;
  minRadius: number;
  maxRadius: number;

  constructor(target: Vec3 = [0, 0, 0], radius = 5, theta = Math.PI / 4, phi = Math.PI / 3) {
    this.target = [...target];
    this.radius = radius;
    this.theta = theta;
    this.phi = Math.min(Math.max(phi, PHI_MIN), PHI_MAX);
    this.minRadius = radius / 50;
    this.maxRadius = radius * 50;
  }

  position(): Vec3 {
    const sinPhi = Math.sin(this.phi);
    return [
      this.target[0] + this.radius * sinPhi * Math.cos(this.theta),
      this.target[1] + this.radius * Math.cos(this.phi),
      this.target[2] + this.radius * sinPhi * Math.sin(this.theta),
    ];
  }

  /** One full viewport height of vertical drag sweeps pi radians. */
  rotate(dxPixels: number, dyPixels: number, viewportHeight: number): void {
    const perPixel = Math.PI / Math.max(viewportHeight, 1);
    this.theta = (this.theta + dxPixels * perPixel) % TWO_PI;
    this.phi = Math.min(Math.max(this.phi + dyPixels * perPixel, PHI_MIN), PHI_MAX);
  }

  zoom(factor: number): void {
    if (!(factor > 0)) throw new Error("zoom factor must be positive");
    this.radius = Math.min(Math.max(this.radius * factor, this.minRadius), this.maxRadius);
  }

  /** Slide the target in the camera plane; the eye follows rigidly. */
  pan(dxPixels: number, dyPixels: number, viewportHeight: number): void {
    const worldPerPixel = this.radius / Math.max(viewportHeight, 1);
    const [right, up] = this.frame();
    for (const c of [0, 1, 2] as const) {
      this.target[c] += (-dxPixels * right[c] + dyPixels * up[c]) * worldPerPixel;
    }
  }

  /** Camera-space right and up vectors in world coordinates. */
  frame(): [Vec3, Vec3] {
    const eye = this.position();
    const forward: Vec3 = [
      this.target[0] - eye[0],
      this.target[1] - eye[1],
      this.target[2] - eye[2],
    ];
    const fLen = Math.hypot(...forward);
    const f: Vec3 = [forward[0] / fLen, forward[1] / fLen, forward[2] / fLen];
    // right = forward x worldUp, renormalized; phi clamping keeps this finite
    const right: Vec3 = [-f[2], 0, f[0]];
    const rLen = Math.hypot(...right);
    const r: Vec3 = [right[0] / rLen, right[1] / rLen, right[2] / rLen];
    const up: Vec3 = [
      r[1] * f[2] - r[2] * f[1],
      r[2] * f[0] - r[0] * f[2],
      r[0] * f[1] - r[1] * f[0],
    ];
    return [r, up];
  }
}
