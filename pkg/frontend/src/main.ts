// Browser entry: one session, one canvas, DOM chrome around the store.

import * as THREE from "three";

import { DesignApi, PrescriptionDoc, Slot } from "./api.js";
import { evalCurve } from "./bezier.js";
import { OrbitRig } from "./camera.js";
import { ObjModel } from "./objparse.js";
import * as palette from "./palette.js";
import { StudioSession } from "./store.js";
import { coalescingLimiter, Limiter } from "./throttle.js";
import { buildSceneGraph } from "./viewer.js";

const MESH_SAMPLES = 48;

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function serviceUrl(): string {
  const override = new URLSearchParams(location.search).get("service");
  return override ?? "http://127.0.0.1:8787";
}

class Studio {
  api = new DesignApi(serviceUrl());
  session: StudioSession | null = null;
  mesh: ObjModel | null = null;
  net: number[][][] | null = null;

  renderer: THREE.WebGLRenderer;
  scene = new THREE.Scene();
  camera = new THREE.PerspectiveCamera(45, 1, 0.01, 1000);
  rig = new OrbitRig([0, 0, 0], 6);
  group: THREE.Group | null = null;
  raycaster = new THREE.Raycaster();

  dragging: { slot: Slot; plane: THREE.Plane; limiter: Limiter<number[]> } | null = null;
  orbiting = false;
  panning = false;
  refreshing = false;
  unsubscribe: (() => void) | null = null;

  constructor(readonly canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    const sun = new THREE.DirectionalLight(0xffffff, 1.2);
    sun.position.set(4, 8, 3);
    this.scene.add(sun);
    this.bindPointer();
    this.resize();
    window.addEventListener("resize", () => this.resize());
    this.renderer.setAnimationLoop(() => this.frame());
  }

  async newSession(): Promise<void> {
    this.unsubscribe?.();
    this.session = await StudioSession.open(this.api);
    this.unsubscribe = this.session.subscribe(() => this.onStoreChange());
    this.mesh = null;
    this.net = null;
    this.onStoreChange();
  }

  onStoreChange(): void {
    const view = this.session?.view;
    const banner = element<HTMLDivElement>("banner");
    if (!view) {
      banner.textContent = "no session";
      banner.style.background = palette.BANNER.grey;
      return;
    }
    banner.textContent = view.banner.message;
    banner.style.background = palette.BANNER[view.banner.tone];
    element<HTMLSpanElement>("dimension").textContent =
      view.dimension === null ? "-" : String(view.dimension);
    element<HTMLSpanElement>("revision").textContent = String(view.revision);
    const error = element<HTMLDivElement>("error");
    error.textContent = view.lastError ? `${view.lastError.code}: ${view.lastError.message}` : "";
    if (view.meshStale) void this.refreshGeometry();
    else this.rebuildGroup();
  }

  async refreshGeometry(): Promise<void> {
    if (!this.session || this.refreshing) return;
    const view = this.session.view;
    if (view.dimension === null) {
      // Unsolved sessions have no realization; show the prescribed pair only.
      this.mesh = null;
      this.net = null;
      this.rebuildGroup();
      return;
    }
    this.refreshing = true;
    try {
      this.mesh = await this.session.fetchMesh(MESH_SAMPLES);
      this.net = (await this.session.fetchNet()).points;
    } finally {
      this.refreshing = false;
    }
    this.rebuildGroup();
  }

  rebuildGroup(): void {
    if (this.group) this.scene.remove(this.group);
    const view = this.session?.view;
    this.group = buildSceneGraph({
      mesh: this.mesh,
      net: this.net,
      handles: view?.handles ?? [],
      selected: view?.selected ?? null,
      pair: view?.pair ?? null,
      ghost: view?.ghost ?? null,
    });
    if (view?.pair) {
      // Admissible diagonals meet at t = 1/2; mark the meeting point.
      const mid = evalCurve(view.pair.q, 0.5);
      const marker = new THREE.Mesh(
        new THREE.SphereGeometry(palette.NET_POINT_RADIUS * 2, 12, 8),
        new THREE.MeshStandardMaterial({ color: palette.DIAGONAL }),
      );
      marker.name = "midpoint";
      marker.position.set(mid[0] ?? 0, mid[1] ?? 0, mid[2] ?? 0);
      this.group.add(marker);
    }
    this.scene.add(this.group);
  }

  // --- pointer handling ---------------------------------------------------

  bindPointer(): void {
    this.canvas.addEventListener("pointerdown", (event) => this.pointerDown(event));
    this.canvas.addEventListener("pointermove", (event) => this.pointerMove(event));
    this.canvas.addEventListener("pointerup", () => this.pointerUp());
    this.canvas.addEventListener("wheel", (event) => {
      event.preventDefault();
      this.rig.zoom(event.deltaY > 0 ? 1.1 : 1 / 1.1);
    });
  }

  pointerNdc(event: PointerEvent): THREE.Vector2 {
    const rect = this.canvas.getBoundingClientRect();
    return new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -((event.clientY - rect.top) / rect.height) * 2 + 1,
    );
  }

  pointerDown(event: PointerEvent): void {
    this.canvas.setPointerCapture(event.pointerId);
    const handles = this.group?.getObjectByName("handles");
    if (handles && this.session) {
      this.raycaster.setFromCamera(this.pointerNdc(event), this.camera);
      const hit = this.raycaster.intersectObjects(handles.children, false)[0];
      if (hit) {
        const [i, j] = hit.object.name.replace("handle:", "").split(",").map(Number);
        const slot: Slot = [i ?? 0, j ?? 0];
        this.session.select(slot);
        const normal = this.camera.getWorldDirection(new THREE.Vector3());
        const plane = new THREE.Plane().setFromNormalAndCoplanarPoint(normal, hit.object.position);
        const session = this.session;
        this.dragging = {
          slot,
          plane,
          limiter: coalescingLimiter<number[]>((point) => session.moveHandle(slot, point), 30),
        };
        return;
      }
    }
    if (event.shiftKey) this.panning = true;
    else this.orbiting = true;
  }

  pointerMove(event: PointerEvent): void {
    if (this.dragging) {
      this.raycaster.setFromCamera(this.pointerNdc(event), this.camera);
      const point = new THREE.Vector3();
      if (this.raycaster.ray.intersectPlane(this.dragging.plane, point)) {
        this.dragging.limiter.push([point.x, point.y, point.z]);
      }
      return;
    }
    if (this.orbiting) this.rig.rotate(event.movementX, event.movementY, this.canvas.clientHeight);
    if (this.panning) this.rig.pan(event.movementX, event.movementY, this.canvas.clientHeight);
  }

  pointerUp(): void {
    this.dragging?.limiter.flush();
    this.dragging = null;
    this.orbiting = false;
    this.panning = false;
  }

  // --- render loop ----------------------------------------------------------

  resize(): void {
    const width = this.canvas.clientWidth || 800;
    const height = this.canvas.clientHeight || 600;
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  frame(): void {
    const [x, y, z] = this.rig.position();
    this.camera.position.set(x, y, z);
    this.camera.lookAt(...this.rig.target);
    this.renderer.render(this.scene, this.camera);
  }
}

async function boot(): Promise<void> {
  const studio = new Studio(element<HTMLCanvasElement>("viewport"));
  await studio.newSession();

  element<HTMLButtonElement>("new-session").addEventListener("click", () => {
    void studio.newSession();
  });

  element<HTMLInputElement>("import").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file || !studio.session) return;
    const doc = JSON.parse(await file.text()) as PrescriptionDoc;
    await studio.session.loadPrescription(doc);
    input.value = "";
  });

  element<HTMLButtonElement>("repair").addEventListener("click", async () => {
    const mode = element<HTMLSelectElement>("repair-mode").value;
    await studio.session?.repair(mode === "auto" ? undefined : mode);
  });

  element<HTMLButtonElement>("export").addEventListener("click", async () => {
    if (!studio.session) return;
    const net = await studio.session.fetchNet();
    const blob = new Blob([JSON.stringify(net, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "net.json";
    link.click();
    URL.revokeObjectURL(link.href);
  });
}

boot().catch((error: unknown) => {
  const banner = element<HTMLDivElement>("banner");
  banner.textContent = `cannot reach the design service: ${String(error)}`;
  banner.style.background = palette.BANNER.red;
});
