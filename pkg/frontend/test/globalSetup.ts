// Boots one real design service for the whole test run. The studio is a
// client; testing it against anything but the actual server would only
// certify the mocks.

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import type { TestProject } from "vitest/node";

let child: ChildProcess | null = null;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const { port } = probe.address() as net.AddressInfo;
      probe.close(() => resolve(port));
    });
  });
}

async function waitReady(baseUrl: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      // Any HTTP answer means uvicorn is listening; 404 is fine.
      await fetch(`${baseUrl}/sessions/readiness-probe`);
      return;
    } catch {
      if (Date.now() > deadline) throw new Error(`service at ${baseUrl} did not come up`);
      await new Promise((r) => setTimeout(r, 200));
    }
  }
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  child = spawn("diagpatch-serve", ["--port", String(port)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  let stderr = "";
  child.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });
  const exited = new Promise<void>((resolve) => child?.once("exit", () => resolve()));
  try {
    await waitReady(baseUrl);
  } catch (error) {
    child.kill();
    throw new Error(`${String(error)}\nserver stderr:\n${stderr}`);
  }
  project.provide("serviceUrl", baseUrl);

  return async () => {
    child?.kill();
    await exited;
  };
}
